#include "hdbell/matkernel.hpp"

#include <cmath>
#include <string>

#include "hdbell/error.hpp"

namespace hdbell {

namespace {

void require_square(const CMatrix& m) {
  if (m.rows() != m.cols()) {
    throw Error(ErrorCode::NotSquare,
                std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
  }
}

void require_hermitian(const CMatrix& m, double tol) {
  require_square(m);
  if (!is_hermitian(m, tol)) {
    throw Error(ErrorCode::NotHermitian,
                "||M - M^dagger|| = " + std::to_string((m - m.adjoint()).norm()));
  }
}

}  // namespace

bool is_hermitian(const CMatrix& m, double tol) {
  if (m.rows() != m.cols()) return false;
  return (m - m.adjoint()).norm() <= tol * std::max(1.0, m.norm());
}

CMatrix hermitian_part(const CMatrix& m) { return 0.5 * (m + m.adjoint()); }

EigDecomposition hermitian_eig(const CMatrix& m, double tol) {
  require_hermitian(m, tol);
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(hermitian_part(m));
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorCode::NumericalFailure, "Hermitian eigensolver did not converge");
  }
  const Eigen::Index n = m.rows();
  EigDecomposition out{RVector(n), CMatrix(n, n)};
  for (Eigen::Index k = 0; k < n; ++k) {
    out.values[k] = solver.eigenvalues()[n - 1 - k];
    out.vectors.col(k) = solver.eigenvectors().col(n - 1 - k);
  }
  return out;
}

RVector hermitian_eigenvalues(const CMatrix& m, double tol) {
  require_hermitian(m, tol);
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(hermitian_part(m), Eigen::EigenvaluesOnly);
  return solver.eigenvalues().reverse();
}

CMatrix kron(const CMatrix& a, const CMatrix& b) {
  CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

CMatrix partial_trace(const CMatrix& m, int dim_a, int dim_b, Party traced) {
  require_square(m);
  if (dim_a < 1 || dim_b < 1 || m.rows() != Eigen::Index(dim_a) * dim_b) {
    throw Error(ErrorCode::DimensionMismatch,
                "matrix of size " + std::to_string(m.rows()) + " is not " +
                    std::to_string(dim_a) + "x" + std::to_string(dim_b));
  }
  if (traced == Party::B) {
    CMatrix out = CMatrix::Zero(dim_a, dim_a);
    for (int i = 0; i < dim_a; ++i)
      for (int j = 0; j < dim_a; ++j)
        for (int k = 0; k < dim_b; ++k) out(i, j) += m(i * dim_b + k, j * dim_b + k);
    return out;
  }
  CMatrix out = CMatrix::Zero(dim_b, dim_b);
  for (int k = 0; k < dim_b; ++k)
    for (int l = 0; l < dim_b; ++l)
      for (int i = 0; i < dim_a; ++i) out(k, l) += m(i * dim_b + k, i * dim_b + l);
  return out;
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ull * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

CVector random_unit_vector(int d, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  CVector v(d);
  for (int i = 0; i < d; ++i) {
    const double re = normal(rng);
    const double im = normal(rng);
    v[i] = Complex(re, im);
  }
  return v / v.norm();
}

CMatrix random_orthonormal_basis(int d, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  CMatrix g(d, d);
  for (int j = 0; j < d; ++j) {
    for (int i = 0; i < d; ++i) {
      const double re = normal(rng);
      const double im = normal(rng);
      g(i, j) = Complex(re, im);
    }
  }
  // Modified Gram-Schmidt, twice for stability.
  for (int j = 0; j < d; ++j) {
    for (int pass = 0; pass < 2; ++pass) {
      for (int k = 0; k < j; ++k) {
        const Complex overlap = g.col(k).dot(g.col(j));
        g.col(j) -= overlap * g.col(k);
      }
    }
    g.col(j) /= g.col(j).norm();
  }
  return g;
}

CMatrix projector(const CVector& v) { return v * v.adjoint(); }

CMatrix random_rank_one_projector(int d, Rng& rng) {
  if (d < 1) throw Error(ErrorCode::InvalidArgument, "dimension must be >= 1");
  return projector(random_unit_vector(d, rng));
}

CMatrix random_rank_one_projector(int d, std::uint64_t seed) {
  Rng rng(seed);
  return random_rank_one_projector(d, rng);
}

RVector schmidt_coefficients(const CVector& psi, int dim_a, int dim_b) {
  if (psi.size() != Eigen::Index(dim_a) * dim_b) {
    throw Error(ErrorCode::DimensionMismatch, "state length does not match dim_a * dim_b");
  }
  CMatrix coeffs(dim_a, dim_b);
  for (int i = 0; i < dim_a; ++i)
    for (int j = 0; j < dim_b; ++j) coeffs(i, j) = psi[i * dim_b + j];
  Eigen::JacobiSVD<CMatrix> svd(coeffs);
  return svd.singularValues();
}

RMatrix embed_real(const CMatrix& h) {
  const Eigen::Index n = h.rows();
  RMatrix out(2 * n, 2 * n);
  out.topLeftCorner(n, n) = h.real();
  out.bottomRightCorner(n, n) = h.real();
  out.topRightCorner(n, n) = -h.imag();
  out.bottomLeftCorner(n, n) = h.imag();
  return out;
}

CMatrix extract_hermitian(const RMatrix& s) {
  const Eigen::Index n = s.rows() / 2;
  const RMatrix re = 0.5 * (s.topLeftCorner(n, n) + s.bottomRightCorner(n, n));
  const RMatrix im = 0.5 * (s.bottomLeftCorner(n, n) - s.topRightCorner(n, n));
  CMatrix out(n, n);
  out.real() = re;
  out.imag() = im;
  return hermitian_part(out);
}

std::vector<CMatrix> hermitian_basis(int n) {
  std::vector<CMatrix> basis;
  basis.reserve(std::size_t(n) * n);
  const double r = 1.0 / std::sqrt(2.0);
  for (int i = 0; i < n; ++i) {
    CMatrix e = CMatrix::Zero(n, n);
    e(i, i) = 1.0;
    basis.push_back(std::move(e));
  }
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      CMatrix s = CMatrix::Zero(n, n);
      s(i, j) = r;
      s(j, i) = r;
      basis.push_back(std::move(s));
      CMatrix a = CMatrix::Zero(n, n);
      a(i, j) = Complex(0.0, -r);
      a(j, i) = Complex(0.0, r);
      basis.push_back(std::move(a));
    }
  }
  return basis;
}

}  // namespace hdbell
