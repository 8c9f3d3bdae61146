#pragma once

// Dimension-restricted lower bounds on the quantum value of a Bell
// functional by alternating optimization over measurements and state.

#include <cstdint>
#include <vector>

#include "hdbell/convex.hpp"
#include "hdbell/functionals.hpp"
#include "hdbell/quantum_model.hpp"

namespace hdbell {

struct SeesawConfig {
  int dimension = 2;
  int restarts = 50;
  int max_iterations = 500;
  /// A sweep counts as stalled when it gains less than this.
  double tol = 1e-8;
  /// Consecutive stalled sweeps before a restart stops.
  int stall_sweeps = 3;
  std::uint64_t seed = 0;
  /// Minimize instead of maximize (used for witnesses, W < 0 is a violation).
  bool minimize = false;
  int threads = 1;
  SdpOptions sdp{};

  void validate() const;
};

struct SeesawResult {
  /// Best objective in the requested sense, offset included.
  double value = 0.0;
  QuantumModel model;
  /// Objective after initialization and after every sweep, one list per
  /// restart (failed restarts leave an empty list).
  std::vector<std::vector<double>> trajectories;
  std::vector<double> restart_values;
  int best_restart = -1;
  int failed_restarts = 0;
  /// Restarts in which at least one measurement SDP failed and was skipped.
  int degraded_restarts = 0;
};

/// Errors: InvalidArgument for bad configs; NumericalFailure if every restart fails.
SeesawResult seesaw(const BellFunctional& f, const SeesawConfig& cfg);

/// Value of f on the model, offset included (no validation of the model).
double model_value(const BellFunctional& f, const QuantumModel& model);

/// Random pure state and random projective measurements of rank-one
/// projectors grouped over outcomes.
QuantumModel random_projective_model(const Scenario& s, int dim, Rng& rng);

/// Reduced operators R[x][a] such that f(model) = sum tr(A_{a|x} R[x][a]) +
/// offset for the given party.
std::vector<std::vector<CMatrix>> reduced_operators(const BellFunctional& f,
                                                    const QuantumModel& model, Party party);

/// Replaces the party's measurements by per-input optima given the rest of the
/// model. Two outcomes use the positive-part closed form; more outcomes solve
/// an SDP per input. A new POVM is kept only if the objective does not drop.
/// Returns false if some SDP failed (those inputs keep their measurements).
bool measurement_step(const BellFunctional& f, QuantumModel& model, Party party,
                      const SdpOptions& opt = {});

/// Bell operator sum c_abxy A_{a|x} (x) B_{b|y}.
CMatrix bell_operator(const BellFunctional& f, const QuantumModel& model);

/// Replaces the state by the leading eigenvector of the Bell operator and
/// returns the new objective (largest eigenvalue + offset).
double state_step(const BellFunctional& f, QuantumModel& model);

}  // namespace hdbell
