#pragma once

// Bell scenarios, behaviors p(a,b|x,y) and quantum realizations.

#include <cstddef>
#include <span>
#include <vector>

#include "hdbell/matkernel.hpp"

namespace hdbell {

struct Scenario {
  int inputs_a = 2;
  int inputs_b = 2;
  int outcomes_a = 2;
  int outcomes_b = 2;

  /// Two inputs and d outcomes per party.
  static Scenario multi_outcome(int d);
  /// 2d inputs (a, x) flattened as a + d * x, two outcomes {click, no-click}.
  static Scenario binarised(int d);

  void validate() const;
  std::size_t size() const {
    return std::size_t(inputs_a) * inputs_b * outcomes_a * outcomes_b;
  }
  /// Flat index; the (x, y) block of outcomes is contiguous.
  std::size_t index(int a, int b, int x, int y) const {
    return ((std::size_t(x) * inputs_b + y) * outcomes_a + a) * outcomes_b + b;
  }

  friend bool operator==(const Scenario&, const Scenario&) = default;
};

inline constexpr double kNegativityClamp = 1e-12;
inline constexpr double kNormalizationTolerance = 1e-9;
inline constexpr double kNoSignalingTolerance = 1e-8;

/// Probability tensor over a scenario. Construction validates positivity
/// (entries above -kNegativityClamp are clamped to zero) and per-setting
/// normalization.
class Behavior {
 public:
  Behavior(Scenario scenario, std::vector<double> values,
           double normalization_tol = kNormalizationTolerance);

  static Behavior uniform(const Scenario& scenario);

  const Scenario& scenario() const { return scenario_; }
  std::span<const double> values() const { return values_; }
  double operator()(int a, int b, int x, int y) const {
    return values_[scenario_.index(a, b, x, y)];
  }

  /// Largest deviation between marginals computed under different inputs of
  /// the other party.
  double signaling() const;
  bool is_no_signaling(double tol = kNoSignalingTolerance) const {
    return signaling() <= tol;
  }

 private:
  Scenario scenario_;
  std::vector<double> values_;
};

/// Per party, per input, list of outcome operators.
using MeasurementSet = std::vector<std::vector<CMatrix>>;

struct QuantumModel {
  int dim = 1;
  CMatrix state;  // density matrix on C^dim (x) C^dim
  MeasurementSet meas_a;
  MeasurementSet meas_b;
  bool projective = false;

  Scenario scenario() const;
  /// Throws InvalidModel describing the first violated invariant.
  void validate() const;
};

struct StateSpec {
  std::vector<double> schmidt;  // lambda_k, sum of squares one
};

Behavior born_behavior(const QuantumModel& model);

/// d rank-one projectors onto (1/sqrt d) sum_k exp(i 2 pi k (s a + phase) / d) |k>,
/// with s = +1, or s = -1 when `conjugate` is set (Bob's convention).
std::vector<CMatrix> fourier_measurement(int d, double phase, bool conjugate);

/// Density matrix of sum_k lambda_k |kk>. Throws NotNormalized.
CMatrix build_schmidt_state(const StateSpec& spec);
CVector schmidt_vector(const StateSpec& spec);

/// Entrywise v p1 + (1 - v) p2.
Behavior mix_behaviors(const Behavior& p1, const Behavior& p2, double v);

/// Marginal table m[x][a] of one party. Throws SignalingDetected when the
/// reductions under different inputs of the other party disagree by more
/// than `tol`; the message reports both values.
std::vector<std::vector<double>> marginal(const Behavior& p, Party party, double tol = 1e-6);

/// Fourier measurements with phases alpha = {0, 1/2} and beta = {-1/4, 1/4}
/// on the state with the published four-decimal Schmidt coefficients
/// (renormalized). Only d = 4 carries published coefficients; other d use the
/// maximally entangled state.
QuantumModel cglmp_reference_model(int d);

/// Maximally entangled state with phases (x - 1/2) / 2 and y / 2. Alice's
/// phase enters with a minus sign so that the preset attains the maximum of
/// the standard SATWAP expression.
QuantumModel satwap_reference_model(int d);

/// Model built from Fourier measurements with the given phases and state.
QuantumModel fourier_model(int d, std::span<const double> alice_phases,
                           std::span<const double> bob_phases, const CMatrix& state);

/// Maximally entangled density matrix on C^d (x) C^d.
CMatrix maximally_entangled_state(int d);

}  // namespace hdbell
