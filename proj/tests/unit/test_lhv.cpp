#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <set>

#include "hdbell/error.hpp"
#include "hdbell/lhv.hpp"

using namespace hdbell;

namespace {

// Plain nested enumeration: every pair of response tables, evaluated through
// a behavior built here rather than through the library's strategy helpers.
double brute_force_max(const BellFunctional& f) {
  const Scenario& s = f.scenario;
  const int na = int(std::pow(s.outcomes_a, s.inputs_a));
  const int nb = int(std::pow(s.outcomes_b, s.inputs_b));
  double best = -1e300;
  for (int ca = 0; ca < na; ++ca) {
    for (int cb = 0; cb < nb; ++cb) {
      std::vector<double> v(s.size(), 0.0);
      for (int x = 0, ra = ca; x < s.inputs_a; ++x, ra /= s.outcomes_a) {
        for (int y = 0, rb = cb; y < s.inputs_b; ++y, rb /= s.outcomes_b) {
          v[s.index(ra % s.outcomes_a, rb % s.outcomes_b, x, y)] = 1.0;
        }
      }
      best = std::max(best, evaluate(f, Behavior(s, v)));
    }
  }
  return best;
}

BellFunctional random_functional(const Scenario& s, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  BellFunctional f = BellFunctional::zero(s, 0.3);
  for (double& c : f.coeffs) c = g(rng);
  return f;
}

// Tsirelson-optimal CHSH behaviour in CGLMP labelling (d = 2).
Behavior chsh_tsirelson() { return born_behavior(cglmp_reference_model(2)); }

}  // namespace

TEST(Strategies, CountsAndGuard) {
  EXPECT_EQ(party_strategy_count(2, 4), 16u);
  EXPECT_EQ(party_strategy_count(8, 2), 256u);
  EXPECT_EQ(party_strategy_count(24, 2), 1u << 24);
  EXPECT_THROW(party_strategy_count(25, 2), Error);
}

TEST(Strategies, DecodeIsMixedRadixWithInputZeroLeast) {
  EXPECT_EQ(decode_strategy(0, 3, 4), (std::vector<int>{0, 0, 0}));
  EXPECT_EQ(decode_strategy(1, 3, 4), (std::vector<int>{1, 0, 0}));
  EXPECT_EQ(decode_strategy(4 * 2 + 3, 3, 4), (std::vector<int>{3, 2, 0}));
  EXPECT_EQ(decode_strategy(63, 3, 4), (std::vector<int>{3, 3, 3}));
}

TEST(Strategies, EnumerationIsCompleteAndDistinct) {
  const Scenario s{2, 3, 3, 2};
  std::set<std::pair<std::vector<int>, std::vector<int>>> seen;
  std::size_t count = 0;
  for (const DeterministicStrategy& d : enumerate_strategies(s)) {
    seen.insert({d.out_a, d.out_b});
    const Behavior p = deterministic_behavior(s, d);
    EXPECT_TRUE(p.is_no_signaling());
    ++count;
  }
  EXPECT_EQ(count, 9u * 8u);
  EXPECT_EQ(seen.size(), count);
}

TEST(LhvBound, CglmpRawSumIsTwo) {
  for (int d = 2; d <= 5; ++d) {
    BellFunctional f = cglmp_functional(d);
    EXPECT_NEAR(lhv_bound(f), 0.0, 1e-12) << d;
    f.offset = 0.0;
    EXPECT_NEAR(lhv_bound(f), 2.0, 1e-12) << d;
  }
}

TEST(LhvBound, MatchesBruteForceOnRandomFunctionals) {
  std::mt19937_64 rng(5);
  for (const Scenario& s : {Scenario{2, 2, 2, 2}, Scenario{2, 3, 3, 2}, Scenario{3, 2, 2, 3}}) {
    for (int trial = 0; trial < 10; ++trial) {
      const BellFunctional f = random_functional(s, rng);
      const LhvBound b = lhv_bound_report(f);
      EXPECT_NEAR(b.value, brute_force_max(f), 1e-12);
      EXPECT_GE(b.ties, 1u);
      EXPECT_NEAR(strategy_value(f, b.maximizer) + f.offset, b.value, 1e-12);
    }
  }
}

TEST(LhvBound, SatwapEnumeration) {
  // Coefficient sums differ from the quoted constant; see the ledger.
  BellFunctional f = satwap_functional(4);
  f.offset = 0.0;
  EXPECT_NEAR(lhv_bound(f), brute_force_max(f), 1e-12);
  EXPECT_NEAR(lhv_bound(f), 1.80998, 1e-5);
}

TEST(LhvBound, TiesCountedForSymmetricFunctional) {
  // Constant functional: every strategy attains the bound.
  BellFunctional f = BellFunctional::zero(Scenario{2, 2, 2, 2});
  for (double& c : f.coeffs) c = 1.0;
  const LhvBound b = lhv_bound_report(f);
  EXPECT_NEAR(b.value, 4.0, 1e-12);
  EXPECT_EQ(b.ties, 16u);
}

TEST(LocalityLp, ChshCriticalVisibility) {
  // The Tsirelson point mixed with white noise is local exactly up to 1/sqrt 2.
  const WitnessReport r = locality_lp(chsh_tsirelson());
  EXPECT_FALSE(r.is_local);
  EXPECT_NEAR(r.lp_objective, 1.0 / std::sqrt(2.0), 1e-7);
  EXPECT_NEAR(r.value_on_target, 1.0 / std::sqrt(2.0) - 1.0, 1e-7);
  EXPECT_GE(r.min_deterministic, -1e-8);
}

TEST(LocalityLp, WitnessContract) {
  const Behavior p = born_behavior(cglmp_reference_model(3));
  const WitnessReport r = locality_lp(p);
  ASSERT_FALSE(r.is_local);
  const Behavior u = Behavior::uniform(p.scenario());
  // normalization equality: 1 + c.p = c.u
  EXPECT_NEAR(1.0 + r.value_on_target, witness_value(r, u), 1e-7);
  EXPECT_NEAR(witness_value(r, p), r.value_on_target, 1e-12);
  EXPECT_NEAR(r.value_on_target, r.lp_objective - 1.0, 1e-8);
  for (const DeterministicStrategy& d : enumerate_strategies(p.scenario())) {
    EXPECT_GE(witness_value(r, deterministic_behavior(p.scenario(), d)), -1e-8);
  }
  // The witness also separates the noisy mixture right above threshold.
  const Behavior above = mix_behaviors(p, u, r.lp_objective + 1e-3);
  EXPECT_LT(witness_value(r, above), 0.0);
}

TEST(LocalityLp, CglmpFourCriticalVisibility) {
  // Multi-outcome d = 4 optimum: violation needs 67.3% visibility.
  const WitnessReport r = locality_lp(born_behavior(cglmp_reference_model(4)));
  EXPECT_NEAR(r.lp_objective, 0.673, 5e-4);
}

TEST(LocalityLp, LocalBehaviorsAreRecognized) {
  const Scenario s = Scenario::multi_outcome(3);
  const Behavior u = Behavior::uniform(s);
  EXPECT_TRUE(locality_lp(u).is_local);
  // Below the critical visibility the mixture is local.
  const Behavior p = born_behavior(cglmp_reference_model(3));
  const double v = locality_lp(p).lp_objective;
  EXPECT_TRUE(locality_lp(mix_behaviors(p, u, v - 0.02)).is_local);
  // A deterministic point is local.
  const DeterministicStrategy d{{1, 2}, {0, 2}};
  EXPECT_TRUE(locality_lp(deterministic_behavior(s, d)).is_local);
}

TEST(LocalityLp, NormalizationReadingsAgreeOnScaledNoise) {
  // With two inputs per party, inputs-only and uniform readings coincide
  // when outcomes equal inputs.
  const Behavior p = chsh_tsirelson();
  LocalityOptions a, b;
  b.normalization = WitnessNormalization::InputsOnly;
  EXPECT_NEAR(locality_lp(p, a).value_on_target, locality_lp(p, b).value_on_target, 1e-7);
  LocalityOptions c;
  c.normalization = WitnessNormalization::Reference;
  c.noise = Behavior::uniform(p.scenario());
  EXPECT_NEAR(locality_lp(p, a).value_on_target, locality_lp(p, c).value_on_target, 1e-7);
}

TEST(LocalityLp, ReferenceNoiseValidation) {
  const Behavior p = chsh_tsirelson();
  LocalityOptions o;
  o.normalization = WitnessNormalization::Reference;
  EXPECT_THROW(locality_lp(p, o), Error);
  o.noise = Behavior::uniform(Scenario::multi_outcome(3));
  EXPECT_THROW(locality_lp(p, o), Error);
  o.noise = deterministic_behavior(p.scenario(), {{0, 1}, {0, 0}});
  EXPECT_THROW(locality_lp(p, o), Error);
}

TEST(LocalityLp, SparseMixturesOfStrategiesAreLocal) {
  // Few-term mixtures sit on faces of the local polytope, where the LP
  // optimum is exactly 1.
  const Scenario s = Scenario::multi_outcome(3);
  Rng rng(17);
  std::uniform_int_distribution<int> outcome(0, 2), terms(1, 4);
  std::uniform_real_distribution<double> w(0.1, 1.0);
  for (int k = 0; k < 40; ++k) {
    std::vector<double> mix(s.size(), 0.0);
    const int t = terms(rng);
    std::vector<double> weights(t);
    double total = 0.0;
    for (double& x : weights) total += (x = w(rng));
    for (int i = 0; i < t; ++i) {
      const Behavior det =
          deterministic_behavior(s, {{outcome(rng), outcome(rng)}, {outcome(rng), outcome(rng)}});
      for (std::size_t c = 0; c < s.size(); ++c) mix[c] += weights[i] / total * det.values()[c];
    }
    const WitnessReport r = locality_lp(Behavior(s, mix));
    EXPECT_TRUE(r.is_local) << k << " objective - 1 = " << r.lp_objective - 1.0;
  }
}
