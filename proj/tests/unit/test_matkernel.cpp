#include <gtest/gtest.h>

#include <complex>

#include "hdbell/error.hpp"
#include "hdbell/matkernel.hpp"

using namespace hdbell;

namespace {

CMatrix random_hermitian(int n, Rng& rng) {
  std::normal_distribution<double> g;
  CMatrix m(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) m(i, j) = {g(rng), g(rng)};
  }
  return hermitian_part(m);
}

CMatrix random_density(int n, Rng& rng) {
  std::normal_distribution<double> g;
  CMatrix m(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) m(i, j) = {g(rng), g(rng)};
  }
  CMatrix rho = m * m.adjoint();
  return rho / rho.trace().real();
}

}  // namespace

TEST(HermitianEig, IdentityHasUnitSpectrum) {
  const auto e = hermitian_eig(CMatrix::Identity(4, 4));
  for (int i = 0; i < 4; ++i) EXPECT_NEAR(e.values(i), 1.0, 1e-14);
}

TEST(HermitianEig, DiagonalSortedDescending) {
  CMatrix m = CMatrix::Zero(2, 2);
  m(0, 0) = -1.0;
  m(1, 1) = 3.0;
  const auto e = hermitian_eig(m);
  EXPECT_NEAR(e.values(0), 3.0, 1e-14);
  EXPECT_NEAR(e.values(1), -1.0, 1e-14);
  EXPECT_NEAR(std::abs(e.vectors(1, 0)), 1.0, 1e-14);
  EXPECT_NEAR(std::abs(e.vectors(0, 1)), 1.0, 1e-14);
}

TEST(HermitianEig, ReconstructsRandomMatrices) {
  Rng rng(7);
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = 2 + trial % 7;
    const CMatrix m = random_hermitian(n, rng);
    const auto e = hermitian_eig(m);
    for (int i = 1; i < n; ++i) ASSERT_GE(e.values(i - 1), e.values(i));
    const CMatrix rec = e.vectors * e.values.cast<Complex>().asDiagonal() * e.vectors.adjoint();
    ASSERT_LE((rec - m).norm(), 1e-9 * m.norm());
    ASSERT_LE((e.vectors.adjoint() * e.vectors - CMatrix::Identity(n, n)).norm(), 1e-10);
  }
}

TEST(HermitianEig, RejectsNonHermitianAndNonSquare) {
  CMatrix m = CMatrix::Zero(2, 2);
  m(0, 1) = 1.0;
  EXPECT_THROW(
      {
        try {
          hermitian_eig(m);
        } catch (const Error& e) {
          EXPECT_EQ(e.code(), ErrorCode::NotHermitian);
          throw;
        }
      },
      Error);
  EXPECT_THROW(hermitian_eig(CMatrix::Zero(2, 3)), Error);
}

TEST(Kron, IdentityAndDiagonal) {
  EXPECT_TRUE(kron(CMatrix::Identity(2, 2), CMatrix::Identity(2, 2)).isApprox(CMatrix::Identity(4, 4)));
  CMatrix p = CMatrix::Zero(2, 2), q = CMatrix::Zero(2, 2);
  p(0, 0) = 1.0;
  q(1, 1) = 1.0;
  CMatrix expect = CMatrix::Zero(4, 4);
  expect(1, 1) = 1.0;
  EXPECT_EQ(kron(p, q), expect);
}

TEST(Kron, TraceFactorizesAndIsAssociative) {
  Rng rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    const CMatrix a = random_hermitian(2, rng) + CMatrix::Identity(2, 2) * Complex(0, 0.3);
    const CMatrix b = random_hermitian(3, rng);
    const CMatrix c = random_hermitian(2, rng);
    EXPECT_NEAR(std::abs(kron(a, b).trace() - a.trace() * b.trace()), 0.0, 1e-12);
    EXPECT_LE((kron(kron(a, b), c) - kron(a, kron(b, c))).norm(), 1e-12);
    // entry layout
    EXPECT_EQ(kron(a, b)(1 * 3 + 2, 0 * 3 + 1), a(1, 0) * b(2, 1));
  }
}

TEST(PartialTrace, ProductAndMaximallyEntangled) {
  Rng rng(3);
  const CMatrix ra = random_density(2, rng), rb = random_density(3, rng);
  EXPECT_LE((partial_trace(kron(ra, rb), 2, 3, Party::B) - ra).norm(), 1e-12);
  EXPECT_LE((partial_trace(kron(ra, rb), 2, 3, Party::A) - rb).norm(), 1e-12);

  CVector phi = CVector::Zero(16);
  for (int k = 0; k < 4; ++k) phi(k * 4 + k) = 0.5;
  const CMatrix red = partial_trace(projector(phi), 4, 4, Party::B);
  EXPECT_LE((red - CMatrix::Identity(4, 4) / 4.0).norm(), 1e-12);
}

TEST(PartialTrace, PreservesTraceAndIsLinear) {
  Rng rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    const CMatrix x = random_density(6, rng), y = random_density(6, rng);
    // direct summation oracle for tr_B
    CMatrix oracle = CMatrix::Zero(2, 2);
    for (int i = 0; i < 2; ++i) {
      for (int j = 0; j < 2; ++j) {
        for (int k = 0; k < 3; ++k) oracle(i, j) += x(i * 3 + k, j * 3 + k);
      }
    }
    const CMatrix pt = partial_trace(x, 2, 3, Party::B);
    EXPECT_LE((pt - oracle).norm(), 1e-14);
    EXPECT_NEAR(pt.trace().real(), 1.0, 1e-12);
    const double al = 0.3, be = -1.7;
    const CMatrix lhs = partial_trace(al * x + be * y, 2, 3, Party::A);
    const CMatrix rhs = al * partial_trace(x, 2, 3, Party::A) + be * partial_trace(y, 2, 3, Party::A);
    EXPECT_LE((lhs - rhs).norm(), 1e-14);
  }
  EXPECT_THROW(partial_trace(CMatrix::Identity(5, 5), 2, 3, Party::A), Error);
}

TEST(RandomProjector, TrivialDimensionOne) {
  const CMatrix p = random_rank_one_projector(1, std::uint64_t{42});
  ASSERT_EQ(p.rows(), 1);
  EXPECT_NEAR(std::abs(p(0, 0) - Complex(1.0)), 0.0, 1e-15);
}

TEST(RandomProjector, IdempotentHermitianTraceOne) {
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const CMatrix p = random_rank_one_projector(2 + int(seed % 5), seed);
    EXPECT_LE((p * p - p).norm(), 1e-10);
    EXPECT_TRUE(is_hermitian(p));
    EXPECT_NEAR(p.trace().real(), 1.0, 1e-12);
  }
}

TEST(RandomProjector, SeedsDiffer) {
  const CMatrix p = random_rank_one_projector(4, std::uint64_t{1});
  const CMatrix q = random_rank_one_projector(4, std::uint64_t{2});
  EXPECT_GT((p - q).norm(), 1e-3);
  EXPECT_EQ(p, random_rank_one_projector(4, std::uint64_t{1}));
}

TEST(RealEmbedding, RoundTripAndSpectrum) {
  Rng rng(9);
  const CMatrix h = random_hermitian(3, rng);
  const RMatrix e = embed_real(h);
  EXPECT_LE((extract_hermitian(e) - h).norm(), 1e-14);
  Eigen::SelfAdjointEigenSolver<RMatrix> es(e);
  const RVector ev = hermitian_eigenvalues(h);
  // every eigenvalue appears twice
  EXPECT_NEAR(es.eigenvalues()(5), ev(0), 1e-12);
  EXPECT_NEAR(es.eigenvalues()(4), ev(0), 1e-12);
}

TEST(HermitianBasis, OrthonormalAndComplete) {
  for (int n = 1; n <= 4; ++n) {
    const auto basis = hermitian_basis(n);
    ASSERT_EQ(int(basis.size()), n * n);
    for (std::size_t i = 0; i < basis.size(); ++i) {
      EXPECT_TRUE(is_hermitian(basis[i]));
      for (std::size_t j = 0; j < basis.size(); ++j) {
        const double ip = (basis[i].adjoint() * basis[j]).trace().real();
        EXPECT_NEAR(ip, i == j ? 1.0 : 0.0, 1e-14);
      }
    }
  }
}

TEST(Schmidt, RecoversCoefficients) {
  CVector psi = CVector::Zero(9);
  psi(0) = 0.8;
  psi(4) = 0.6;
  const RVector s = schmidt_coefficients(psi, 3, 3);
  EXPECT_NEAR(s(0), 0.8, 1e-14);
  EXPECT_NEAR(s(1), 0.6, 1e-14);
  EXPECT_NEAR(s(2), 0.0, 1e-14);
}
