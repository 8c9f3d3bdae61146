#pragma once

// Bell functionals compiled to a flat coefficient tensor over a scenario.

#include <optional>
#include <string>
#include <vector>

#include "hdbell/quantum_model.hpp"

namespace hdbell {

struct BellFunctional {
  Scenario scenario;
  std::vector<double> coeffs;  // indexed like Behavior values
  double offset = 0.0;
  std::string name;
  /// Input layout tag: "multi" or "binarised".
  std::string layout = "multi";
  /// Published local bound of the raw (offset-free) expression, if any.
  std::optional<double> published_lhv_constant;

  void validate() const;
  double coeff(int a, int b, int x, int y) const { return coeffs[scenario.index(a, b, x, y)]; }
  double& coeff(int a, int b, int x, int y) { return coeffs[scenario.index(a, b, x, y)]; }

  static BellFunctional zero(const Scenario& s, double offset = 0.0);
};

/// I_d = P(A1<=B1) + P(B1<=A2) + P(B2<=A1) - P(B2<=A2) - 2.
BellFunctional cglmp_functional(int d);

enum class SatwapConvention {
  /// beta_k uses g(k + 1 - 1/(2m)) = g(k + 3/4), as in the original two-input family.
  Standard,
  /// beta_k uses g(k + 1/2).
  AsPrinted,
};

struct SatwapCoefficients {
  int d = 0;
  std::vector<double> alpha;
  std::vector<double> beta;
  /// g evaluated at the points that enter alpha and beta, keyed by argument.
  std::vector<std::pair<double, double>> g_values;
};

SatwapCoefficients satwap_coefficients(int d,
                                       SatwapConvention convention = SatwapConvention::Standard);

/// sum_k (alpha_k P_k - beta_k Q_k) - C. For d = 4 the constant is the published
/// 1.798; other d use the exact local maximum of the raw expression.
BellFunctional satwap_functional(int d, SatwapConvention convention = SatwapConvention::Standard);

/// sum c p + offset. Throws ScenarioMismatch.
double evaluate(const BellFunctional& f, const Behavior& p);

/// Solves v f(p_opt) + (1 - v) f(p_noise) = threshold for v.
double critical_visibility(const BellFunctional& f, const Behavior& p_opt,
                           const Behavior& p_noise, double threshold);

enum class NormalizationMode {
  /// value / max
  Ratio,
  /// (value - offset) / (max - offset): ratio of the raw expressions.
  ShiftedRatio,
};

/// Rescaled functional whose value at the quantum maximum is one.
BellFunctional normalize_for_statistics(const BellFunctional& f, NormalizationMode mode,
                                        double quantum_max);

/// Maximum of the raw coefficient contraction over deterministic strategies,
/// by brute force over both parties. Intended for small scenarios.
double raw_local_maximum(const BellFunctional& f);

}  // namespace hdbell
