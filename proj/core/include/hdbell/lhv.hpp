#pragma once

// Local-hidden-variable analysis: deterministic strategies, local bounds and
// the locality-membership linear program that produces Bell witnesses.

#include <cstdint>
#include <optional>
#include <vector>

#include "hdbell/convex.hpp"
#include "hdbell/functionals.hpp"

namespace hdbell {

/// Per-party strategy count cap; enumeration beyond this throws TooLarge.
inline constexpr std::uint64_t kMaxStrategiesPerParty = std::uint64_t{1} << 24;

struct DeterministicStrategy {
  std::vector<int> out_a;  // input x -> outcome
  std::vector<int> out_b;  // input y -> outcome
};

/// outcomes^inputs, throwing TooLarge above kMaxStrategiesPerParty.
std::uint64_t party_strategy_count(int inputs, int outcomes);

/// Mixed-radix decode of a strategy code (input 0 is the least significant digit).
std::vector<int> decode_strategy(std::uint64_t code, int inputs, int outcomes);

/// Streams every joint strategy exactly once; nothing is materialized.
class StrategyRange {
 public:
  explicit StrategyRange(const Scenario& s);

  class iterator {
   public:
    using value_type = DeterministicStrategy;
    using difference_type = std::ptrdiff_t;
    iterator() = default;
    iterator(const StrategyRange* r, std::uint64_t code) : range_(r), code_(code) {}
    DeterministicStrategy operator*() const;
    iterator& operator++() {
      ++code_;
      return *this;
    }
    iterator operator++(int) {
      iterator t = *this;
      ++code_;
      return t;
    }
    bool operator==(const iterator& o) const { return code_ == o.code_; }

   private:
    const StrategyRange* range_ = nullptr;
    std::uint64_t code_ = 0;
  };

  iterator begin() const { return {this, 0}; }
  iterator end() const { return {this, count_a_ * count_b_}; }
  std::uint64_t size() const { return count_a_ * count_b_; }
  std::uint64_t count_a() const { return count_a_; }
  std::uint64_t count_b() const { return count_b_; }

 private:
  Scenario scenario_;
  std::uint64_t count_a_;
  std::uint64_t count_b_;
};

StrategyRange enumerate_strategies(const Scenario& s);

/// Deterministic behavior p(a,b|x,y) = [a = out_a[x]] [b = out_b[y]].
Behavior deterministic_behavior(const Scenario& s, const DeterministicStrategy& d);

/// sum_x,y c(out_a[x], out_b[y] | x, y), offset excluded.
double strategy_value(const BellFunctional& f, const DeterministicStrategy& d);

struct LhvBound {
  double value = 0.0;  // offset included
  /// Joint strategies attaining the maximum within 1e-12.
  std::uint64_t ties = 0;
  DeterministicStrategy maximizer;
};

LhvBound lhv_bound_report(const BellFunctional& f);
double lhv_bound(const BellFunctional& f);

/// Normalization of the witness program  1 + c.p = c.r, where r is a noise
/// reference. The kappa readings use r = kappa * (all-ones).
enum class WitnessNormalization {
  /// kappa = 1 / (outcomes_a outcomes_b): c contracted with the uniform behavior.
  UniformBehavior,
  /// kappa = 1 / (inputs_a inputs_b).
  InputsOnly,
  /// kappa = 1 / (inputs_a outcomes_a inputs_b outcomes_b), one over the number of cells.
  AllCells,
  /// r = LocalityOptions::noise, e.g. binarised white noise. Then 1 + W is the
  /// largest visibility at which v p + (1 - v) r stays local.
  Reference,
};

struct LocalityOptions {
  WitnessNormalization normalization = WitnessNormalization::UniformBehavior;
  /// Required for WitnessNormalization::Reference. Must share the target's
  /// scenario and be identical across input pairs.
  std::optional<Behavior> noise;
  double tol = SolverTolerances{}.lp;
  int max_rounds = 500;
  /// Columns added per pricing round.
  int columns_per_round = 64;
};

struct WitnessReport {
  BellFunctional functional;  // offset 0
  /// Optimal value of min 1 + c.p; +inf when the program is unbounded.
  double lp_objective = 0.0;
  /// lp_objective >= 1 - 10 tol: boundary behaviors count as local.
  bool is_local = true;
  /// W = c.p = lp_objective - 1.
  double value_on_target = 0.0;
  /// min over all deterministic strategies of c.D, re-verified after the solve.
  double min_deterministic = 0.0;
  int rounds = 0;
  int columns = 0;
};

/// Solves the witness program by column generation over deterministic
/// strategies. Errors: NumericalFailure when the master LP does not converge.
WitnessReport locality_lp(const Behavior& p, const LocalityOptions& opt = {});

double witness_value(const WitnessReport& report, const Behavior& p);

}  // namespace hdbell
