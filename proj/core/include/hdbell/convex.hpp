#pragma once

// Dense LP (two-phase tableau simplex) and block-diagonal SDP
// (primal-dual interior point, Nesterov-Todd scaling) solvers.

#include <limits>
#include <string>
#include <string_view>
#include <vector>

#include "hdbell/matkernel.hpp"

namespace hdbell {

/// Solver tolerances shared by every module.
struct SolverTolerances {
  double lp = 1e-9;
  double sdp = 1e-7;
};

enum class SolveStatus { Optimal, Infeasible, Unbounded, MaxIterations };

std::string_view to_string(SolveStatus s);

using BlockMatrix = std::vector<RMatrix>;

struct SolveReport {
  SolveStatus status = SolveStatus::MaxIterations;
  double value = 0.0;
  /// LP: primal x. LMI-form SDP: y. Standard-form SDP: multipliers y.
  RVector x;
  /// LP: one multiplier per inequality row, then per equality row.
  RVector dual;
  /// LMI form: the mapped matrix F(y). Standard form: X.
  BlockMatrix blocks;
  /// LMI form: the dual matrix certificate. Standard form: slack Z.
  BlockMatrix dual_blocks;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  double gap = 0.0;
  /// Most negative eigenvalue over the PSD blocks (SDP only).
  double min_eigenvalue = 0.0;
  int iterations = 0;

  bool optimal() const { return status == SolveStatus::Optimal; }
};

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// max (or min) c^T x  s.t.  a_ub x <= b_ub,  a_eq x = b_eq,  lower <= x <= upper.
/// Empty bound vectors mean free variables.
struct LinearProgram {
  RVector objective;
  bool maximize = true;
  RMatrix a_ub;
  RVector b_ub;
  RMatrix a_eq;
  RVector b_eq;
  RVector lower;
  RVector upper;

  int num_vars() const { return int(objective.size()); }
  void validate() const;
};

enum class LpMethod { Simplex, InteriorPoint };

struct LpOptions {
  double tol = SolverTolerances{}.lp;
  LpMethod method = LpMethod::Simplex;
  /// Pivot limit for the simplex (0 picks 50 (rows + columns)); iteration
  /// limit for the interior-point method (0 picks 200).
  long max_pivots = 0;
  /// Consecutive degenerate pivots before switching to Bland's rule.
  int degenerate_switch = 50;
  /// Relative size of the phase-2 anti-degeneracy perturbation.
  double perturbation = 1e-7;
};

SolveReport solve_lp(const LinearProgram& lp, const LpOptions& opt = {});

/// maximize c^T y  s.t.  F0 + sum_i y_i F_i >= 0 (block diagonal),  E y = f.
struct SemidefiniteProgram {
  std::vector<int> block_sizes;
  BlockMatrix f0;
  std::vector<BlockMatrix> f;
  RVector objective;
  RMatrix eq_matrix;
  RVector eq_rhs;

  int num_vars() const { return int(objective.size()); }
  void validate() const;
};

/// minimize <C, X>  s.t.  <A_i, X> = b_i,  X >= 0 (block diagonal).
struct StandardSdp {
  std::vector<int> block_sizes;
  BlockMatrix c;
  std::vector<BlockMatrix> a;
  RVector b;

  void validate() const;
};

struct SdpOptions {
  double tol = SolverTolerances{}.sdp;
  int max_iterations = 100;
  /// Fraction of the step to the boundary.
  double step_fraction = 0.95;
};

SolveReport solve_sdp(const SemidefiniteProgram& sdp, const SdpOptions& opt = {});
SolveReport solve_sdp(const StandardSdp& sdp, const SdpOptions& opt = {});

/// Frobenius inner product summed over blocks.
double block_dot(const BlockMatrix& a, const BlockMatrix& b);
double block_min_eigenvalue(const BlockMatrix& a);

}  // namespace hdbell
