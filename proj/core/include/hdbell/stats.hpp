#pragma once

// Experimental count tables and finite-statistics analysis: normalization,
// Poisson Monte-Carlo errors, Chernoff bounds and white-noise diagnostics.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hdbell/functionals.hpp"

namespace hdbell {

enum class CountKind { RawCounts, NormalizedFrequencies };

std::string to_string(CountKind k);

struct CountTable {
  Scenario scenario;
  /// Indexed like Behavior values.
  std::vector<double> values;
  CountKind kind = CountKind::RawCounts;
  /// Counts per (x, y) block that a normalized table stands for.
  std::optional<double> assumed_total_per_setting;

  /// Throws ParseError for negative entries and NotNormalized when a
  /// normalized block is off by more than 1e-3 (tables are rounded).
  void validate() const;
  double block_sum(int x, int y) const;
};

/// Reads `x,y,a,b,value` rows (x, y counted from 1). The sidecar
/// `<stem>.json` with {kind, d, assumed_total_per_setting} is optional;
/// without it the outcome count is inferred and the kind is raw counts when
/// every value is an integer. Errors: ParseError (with line and column),
/// IncompleteTable.
CountTable load_counts(const std::string& path);
CountTable parse_counts(const std::string& csv_text, const std::string& sidecar_json = "");
void save_counts(const std::string& path, const CountTable& t);

/// Per-block normalization. Errors: ZeroBlock.
Behavior behavior_from_counts(const CountTable& t);

/// Synthetic counts round(p * total) per cell.
CountTable counts_from_behavior(const Behavior& p, double total_per_setting);

struct MonteCarloOptions {
  int trials = 10000;
  std::uint64_t seed = 0;
  int threads = 1;
  /// Adds 0.5 to every mean before resampling (sensitivity analysis only).
  bool regularize = false;
};

/// Standard deviation of f over tables resampled cell by cell from Poisson
/// distributions with the observed counts as means, each block renormalized.
/// Errors: MissingTotals for normalized tables without assumed totals.
double poisson_mc_error(const CountTable& t, const BellFunctional& f, const MonteCarloOptions& opt = {});

/// Binary relative entropy x ln(x/y) + (1-x) ln((1-x)/(1-y)). Errors: DomainError
/// unless both arguments lie in (0, 1).
double kl_divergence(double x, double y);

struct ChernoffResult {
  double threshold = 0.0;
  double observed = 0.0;
  double gap = 0.0;
  double kl = 0.0;
  double counts = 0.0;
  /// exp(-kl counts), clamped to the smallest positive double; see log10.
  double p_value_bound = 1.0;
  double log10_p_value_bound = 0.0;
  double p_target = 0.0;
  /// ln(1/p_target)/kl: counts needed to reach p_target.
  double n_min = 0.0;
};

/// Errors: DomainError unless 0 < threshold < observed < 1, counts >= 0 and
/// p_target in (0, 1).
ChernoffResult chernoff_analysis(double normalized_threshold, double normalized_observed,
                                 double counts, double p_target = 1e-30);

/// Visibility v with value(p_exp) = v value(p_opt) + (1 - v) value(p_noise).
/// Errors: ThresholdOutsideRange when v falls outside (0, 1 + 1e-9].
double visibility_report(const BellFunctional& f, const Behavior& p_exp, const Behavior& p_opt,
                         const Behavior& p_noise);

struct FidelityFit {
  /// Weight of white noise in every measurement operator.
  double noise = 0.0;
  /// 1 - noise.
  double fidelity = 1.0;
};

/// Ideal state, every operator replaced by (1 - mu) A + mu I/d; solves
/// value = observed for mu by bisection. Errors: ThresholdOutsideRange.
FidelityFit measurement_fidelity_fit(const BellFunctional& f, const QuantumModel& ideal, double observed,
                                     double tol = 1e-10);

/// Model with every measurement operator mixed with white noise at rate mu.
QuantumModel noisy_measurements(const QuantumModel& m, double mu);

struct StatsReport {
  double bell_value = 0.0;
  double mc_sigma = 0.0;
  int mc_trials = 0;
  double quantum_max = 0.0;
  double normalized_value = 0.0;
  double normalized_threshold = 0.0;
  /// Published normalized value when it differs from ours by more than 5e-4.
  std::optional<double> quoted_normalized_value;
  ChernoffResult chernoff;
  double visibility = 0.0;
  FidelityFit fidelity;
  std::optional<double> assumed_total_per_setting;
};

struct ExperimentSpec {
  BellFunctional functional;
  QuantumModel ideal;
  /// Maximum used to normalize; the threshold is given on the same scale.
  double quantum_max = 0.0;
  NormalizationMode normalization = NormalizationMode::Ratio;
  double threshold_value = 0.0;
  double p_target = 1e-30;
  /// Total counts for the p-value bound; defaults to 4 times the assumed totals.
  std::optional<double> counts;
  std::optional<double> quoted_normalized_value;
};

StatsReport analyze_experiment(const CountTable& t, const ExperimentSpec& spec,
                               const MonteCarloOptions& mc = {});

}  // namespace hdbell
