#pragma once

// Dense complex linear algebra used throughout hdbell. Matrices are Eigen
// column-major objects; "Hermitian" inputs are checked against a tolerance
// relative to their Frobenius norm.

#include <complex>
#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/Dense>

namespace hdbell {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;

/// The one generator type threaded through every sampling routine.
using Rng = std::mt19937_64;

inline constexpr double kHermitianTolerance = 1e-10;

enum class Party { A, B };

struct EigDecomposition {
  RVector values;   // descending
  CMatrix vectors;  // column k belongs to values[k]
};

/// Throws NotSquare / NotHermitian.
EigDecomposition hermitian_eig(const CMatrix& m, double tol = kHermitianTolerance);

/// Eigenvalues only, descending.
RVector hermitian_eigenvalues(const CMatrix& m, double tol = kHermitianTolerance);

bool is_hermitian(const CMatrix& m, double tol = kHermitianTolerance);
CMatrix hermitian_part(const CMatrix& m);

CMatrix kron(const CMatrix& a, const CMatrix& b);

/// Traces out `traced` from an operator on C^dim_a (x) C^dim_b.
CMatrix partial_trace(const CMatrix& m, int dim_a, int dim_b, Party traced);

/// Independent stream seed for task `stream` under a master seed (splitmix64).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

CVector random_unit_vector(int d, Rng& rng);

/// Columns form a Haar-distributed orthonormal basis of C^d.
CMatrix random_orthonormal_basis(int d, Rng& rng);

/// |v><v| for v a normalized complex Gaussian vector.
CMatrix random_rank_one_projector(int d, Rng& rng);
CMatrix random_rank_one_projector(int d, std::uint64_t seed);

CMatrix projector(const CVector& v);

/// Schmidt coefficients (descending) of a pure state on C^dim_a (x) C^dim_b,
/// with the basis ordering |i>|j> -> i * dim_b + j.
RVector schmidt_coefficients(const CVector& psi, int dim_a, int dim_b);

/// Real symmetric embedding [[Re, -Im], [Im, Re]] of a Hermitian matrix.
RMatrix embed_real(const CMatrix& h);

/// Inverse of embed_real on the structured part of a 2n x 2n symmetric matrix.
CMatrix extract_hermitian(const RMatrix& s);

/// Orthonormal basis (w.r.t. the trace inner product) of the real vector space
/// of n x n Hermitian matrices: diagonal units, then symmetric and
/// antisymmetric off-diagonal pairs.
std::vector<CMatrix> hermitian_basis(int n);

}  // namespace hdbell
