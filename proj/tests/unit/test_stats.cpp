#include <gtest/gtest.h>

#include <cmath>
#include <cstdio>
#include <functional>
#include <fstream>
#include <random>
#include <sstream>

#include "hdbell/binarise.hpp"
#include "hdbell/error.hpp"
#include "hdbell/stats.hpp"

using namespace hdbell;

namespace {

const std::string kData = HDBELL_DATA_DIR;

std::string csv_of(const CountTable& t) {
  const std::string path = testing::TempDir() + "hdbell_counts.csv";
  save_counts(path, t);
  std::ifstream in(path);
  std::ostringstream os;
  os << in.rdbuf();
  std::remove(path.c_str());
  return os.str();
}

CountTable raw_table(const Behavior& p, double total) { return counts_from_behavior(p, total); }

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::InvalidArgument;
}

}  // namespace

TEST(Counts, BundledTablesLoad) {
  for (const char* name : {"/table4.csv", "/table5.csv"}) {
    const CountTable t = load_counts(kData + name);
    EXPECT_EQ(t.scenario, Scenario::multi_outcome(4));
    EXPECT_EQ(t.kind, CountKind::NormalizedFrequencies);
    ASSERT_TRUE(t.assumed_total_per_setting);
    EXPECT_EQ(*t.assumed_total_per_setting, 40000.0);
    for (int x = 0; x < 2; ++x)
      for (int y = 0; y < 2; ++y) {
        EXPECT_GE(t.block_sum(x, y), 0.999);
        EXPECT_LE(t.block_sum(x, y), 1.001);
      }
  }
}

TEST(Counts, TableCellsLandWhereTheTableShowsThem) {
  // Row B1=1, column A2=1 of the CGLMP table.
  const CountTable t = load_counts(kData + "/table4.csv");
  EXPECT_EQ(t.values[t.scenario.index(1, 1, 1, 0)], 0.2408);
  // Row B2=0, column A2=3.
  EXPECT_EQ(t.values[t.scenario.index(3, 0, 1, 1)], 0.2137);
}

TEST(Counts, ParseErrorsCarryLocation) {
  const std::string header = "x,y,a,b,value\n";
  try {
    parse_counts(header + "1,1,0,0,0.5\n1,1,0,1,abc\n");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ParseError);
    EXPECT_NE(std::string(e.what()).find("line 3, column 5"), std::string::npos) << e.what();
  }
  EXPECT_EQ(code_of([&] { parse_counts("x,y,a,b,count\n"); }), ErrorCode::ParseError);
  EXPECT_EQ(code_of([&] { parse_counts(header + "3,1,0,0,1\n"); }), ErrorCode::ParseError);
  EXPECT_EQ(code_of([&] { parse_counts(header + "1,1,0,0,-1\n"); }), ErrorCode::ParseError);
  EXPECT_EQ(code_of([&] { parse_counts(header + "1,1,0,0,1\n1,1,0,0,2\n", "{\"d\": 2}"); }), ErrorCode::ParseError);
  EXPECT_EQ(code_of([&] { parse_counts(header + "1,1,0,0,1\n", "{\"d\": 3, \"kind\": \"weird\"}"); }),
            ErrorCode::ParseError);
  EXPECT_EQ(code_of([&] { parse_counts(header + "1,1,0,0,1\n", "{not json"); }), ErrorCode::ParseError);
}

TEST(Counts, MissingCellIsIncomplete) {
  std::string csv = csv_of(raw_table(Behavior::uniform(Scenario::multi_outcome(3)), 900));
  csv.erase(csv.rfind('\n', csv.size() - 2) + 1);  // drop the last row
  EXPECT_EQ(code_of([&] { parse_counts(csv); }), ErrorCode::IncompleteTable);
}

TEST(Counts, UnnormalizedFrequencyTableRejected) {
  EXPECT_EQ(code_of([&] { parse_counts("x,y,a,b,value\n1,1,0,0,0.7\n1,1,0,1,0.1\n1,1,1,0,0.1\n1,1,1,1,0.05\n"
                                       "1,2,0,0,0.25\n1,2,0,1,0.25\n1,2,1,0,0.25\n1,2,1,1,0.25\n"
                                       "2,1,0,0,0.25\n2,1,0,1,0.25\n2,1,1,0,0.25\n2,1,1,1,0.25\n"
                                       "2,2,0,0,0.25\n2,2,0,1,0.25\n2,2,1,0,0.25\n2,2,1,1,0.25\n"); }),
            ErrorCode::NotNormalized);
}

TEST(Counts, RoundTripThroughCsvAndSynthesis) {
  const Behavior p = born_behavior(satwap_reference_model(3));
  const double total = 12345;
  const CountTable t = raw_table(p, total);
  const CountTable back = parse_counts(csv_of(t));
  EXPECT_EQ(back.kind, CountKind::RawCounts);
  EXPECT_EQ(back.values, t.values);
  const Behavior q = behavior_from_counts(back);
  for (std::size_t i = 0; i < q.values().size(); ++i) {
    EXPECT_NEAR(q.values()[i], p.values()[i], 2.0 / total);
  }
}

TEST(BehaviorFromCounts, UniformAndZeroBlock) {
  const Scenario s = Scenario::multi_outcome(2);
  CountTable t;
  t.scenario = s;
  t.values.assign(s.size(), 7.0);
  const Behavior u = behavior_from_counts(t);
  for (double v : u.values()) EXPECT_DOUBLE_EQ(v, 0.25);
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) t.values[s.index(a, b, 1, 0)] = 0.0;
  EXPECT_EQ(code_of([&] { behavior_from_counts(t); }), ErrorCode::ZeroBlock);
}

TEST(BehaviorFromCounts, ExperimentalBellValues) {
  const Behavior p4 = behavior_from_counts(load_counts(kData + "/table4.csv"));
  EXPECT_NEAR(evaluate(cglmp_functional(4), p4), 0.3346, 2e-3);
  const Behavior p5 = behavior_from_counts(load_counts(kData + "/table5.csv"));
  EXPECT_NEAR(evaluate(satwap_functional(4), p5), 0.2832, 2e-3);
}

TEST(MonteCarlo, BracketsQuotedErrors) {
  const CountTable t4 = load_counts(kData + "/table4.csv");
  const double s4 = poisson_mc_error(t4, cglmp_functional(4));
  EXPECT_GE(s4, 0.0015);
  EXPECT_LE(s4, 0.0045);
  const double s5 = poisson_mc_error(load_counts(kData + "/table5.csv"), satwap_functional(4));
  EXPECT_GE(s5, 0.0014);
  EXPECT_LE(s5, 0.0041);
}

TEST(MonteCarlo, ReproducibleAndTrialCountConsistent) {
  const CountTable t = load_counts(kData + "/table4.csv");
  const BellFunctional f = cglmp_functional(4);
  MonteCarloOptions a, b, c;
  a.seed = b.seed = c.seed = 9;
  b.threads = 3;
  c.trials = 5000;
  const double sa = poisson_mc_error(t, f, a);
  EXPECT_EQ(sa, poisson_mc_error(t, f, b));
  EXPECT_NEAR(poisson_mc_error(t, f, c) / sa, 1.0, 0.05);
}

TEST(MonteCarlo, PoissonScaling) {
  CountTable t = load_counts(kData + "/table5.csv");
  const BellFunctional f = satwap_functional(4);
  const double base = poisson_mc_error(t, f);
  t.assumed_total_per_setting = 80000.0;
  EXPECT_NEAR(poisson_mc_error(t, f) / base, 1.0 / std::sqrt(2.0), 0.1 / std::sqrt(2.0));
}

TEST(MonteCarlo, ZeroFunctionalAndMissingTotals) {
  CountTable t;
  t.scenario = Scenario::multi_outcome(3);
  t.values.assign(t.scenario.size(), 1000.0);
  EXPECT_EQ(poisson_mc_error(t, BellFunctional::zero(t.scenario, 0.3)), 0.0);
  CountTable n = load_counts(kData + "/table4.csv");
  n.assumed_total_per_setting.reset();
  EXPECT_EQ(code_of([&] { poisson_mc_error(n, cglmp_functional(4)); }), ErrorCode::MissingTotals);
  MonteCarloOptions reg;
  reg.regularize = true;
  EXPECT_GT(poisson_mc_error(t, cglmp_functional(3), reg), 0.0);
}

TEST(KlDivergence, ValuesAndDomain) {
  EXPECT_EQ(kl_divergence(0.5, 0.5), 0.0);
  // Direct evaluation of x ln(x/y) + (1-x) ln((1-x)/(1-y)).
  const auto direct = [](double x, double y) {
    return x * std::log(x / y) + (1 - x) * std::log((1 - x) / (1 - y));
  };
  EXPECT_NEAR(kl_divergence(0.9169, 0.8356), direct(0.9169, 0.8356), 1e-15);
  EXPECT_NEAR(kl_divergence(0.9169, 0.8356), 0.0284, 1e-4);
  EXPECT_NEAR(kl_divergence(0.9913, 0.9571), 0.0209, 1e-4);
  for (double bad : {0.0, 1.0, -0.1, 1.5}) {
    EXPECT_EQ(code_of([&] { kl_divergence(bad, 0.5); }), ErrorCode::DomainError);
    EXPECT_EQ(code_of([&] { kl_divergence(0.5, bad); }), ErrorCode::DomainError);
  }
}

TEST(KlDivergence, NonnegativeWithEqualityOnDiagonal) {
  Rng rng(4);
  std::uniform_real_distribution<double> u(1e-6, 1.0 - 1e-6);
  for (int i = 0; i < 10000; ++i) {
    const double x = u(rng), y = u(rng);
    EXPECT_GE(kl_divergence(x, y), 0.0);
    EXPECT_GT(kl_divergence(x, y), 0.0);
    EXPECT_EQ(kl_divergence(x, x), 0.0);
  }
}

TEST(Chernoff, MinimumCounts) {
  EXPECT_NEAR(chernoff_analysis(0.8356, 0.9169, 0, 1e-30).n_min, 2420, 0.02 * 2420);
  EXPECT_NEAR(chernoff_analysis(0.8356, 0.9169, 0, 1e-300).n_min, 24000, 0.05 * 24000);
  EXPECT_NEAR(chernoff_analysis(0.9571, 0.9913, 0, 1e-300).n_min, 33000, 0.02 * 33000);
}

TEST(Chernoff, AlgebraicIdentityAndRange) {
  for (double p : {1e-3, 1e-30, 1e-300}) {
    const ChernoffResult r = chernoff_analysis(0.6, 0.7, 5000, p);
    EXPECT_NEAR(r.n_min * r.kl, std::log(1.0 / p), 1e-12 * std::log(1.0 / p));
    EXPECT_GT(r.p_value_bound, 0.0);
    EXPECT_LE(r.p_value_bound, 1.0);
    EXPECT_NEAR(r.gap, 0.1, 1e-15);
  }
  const ChernoffResult big = chernoff_analysis(0.8356, 0.9169, 200000);
  EXPECT_GT(big.p_value_bound, 0.0);
  EXPECT_LT(big.log10_p_value_bound, -2000.0);
  EXPECT_EQ(chernoff_analysis(0.8, 0.9, 0).p_value_bound, 1.0);
  EXPECT_EQ(code_of([] { chernoff_analysis(0.9, 0.8, 10); }), ErrorCode::DomainError);
  EXPECT_EQ(code_of([] { chernoff_analysis(0.8, 0.9, 10, 1.0); }), ErrorCode::DomainError);
}

TEST(Visibility, ExperimentalTables) {
  const Behavior u = Behavior::uniform(Scenario::multi_outcome(4));
  const Behavior opt4 = born_behavior(cglmp_reference_model(4));
  const Behavior p4 = behavior_from_counts(load_counts(kData + "/table4.csv"));
  EXPECT_NEAR(visibility_report(cglmp_functional(4), p4, opt4, u), 0.9730, 1e-3);
  EXPECT_NEAR(visibility_report(cglmp_functional(4), opt4, opt4, u), 1.0, 1e-12);
  const Behavior opt5 = born_behavior(satwap_reference_model(4));
  const Behavior p5 = behavior_from_counts(load_counts(kData + "/table5.csv"));
  EXPECT_NEAR(visibility_report(satwap_functional(4), p5, opt5, u), 0.988, 2e-3);
  EXPECT_EQ(code_of([&] { visibility_report(cglmp_functional(4), u, u, u); }), ErrorCode::ThresholdOutsideRange);
}

TEST(Fidelity, NoiselessAndSyntheticRecovery) {
  const QuantumModel m = cglmp_reference_model(3);
  const BellFunctional f = cglmp_functional(3);
  const double mu = 0.03;
  const double observed = evaluate(f, born_behavior(noisy_measurements(m, mu)));
  const FidelityFit fit = measurement_fidelity_fit(f, m, observed);
  EXPECT_NEAR(fit.noise, mu, 1e-8);
  EXPECT_NEAR(fit.fidelity, 0.97, 1e-8);
  EXPECT_NEAR(measurement_fidelity_fit(f, m, evaluate(f, born_behavior(m))).noise, 0.0, 1e-8);
  EXPECT_EQ(code_of([&] { measurement_fidelity_fit(f, m, 1.0); }), ErrorCode::ThresholdOutsideRange);
  // Noisy operators still form POVMs.
  noisy_measurements(m, 0.2).validate();
}

TEST(Fidelity, ExperimentalTables) {
  const auto fit = [](const char* file, Family fam) {
    const Behavior p = behavior_from_counts(load_counts(kData + file));
    return measurement_fidelity_fit(family_functional(fam, 4), family_reference_model(fam, 4),
                                    evaluate(family_functional(fam, 4), p)).fidelity;
  };
  EXPECT_NEAR(fit("/table4.csv", Family::Cglmp), 0.988, 0.005);
  EXPECT_NEAR(fit("/table5.csv", Family::Satwap), 0.993, 0.005);
}

TEST(AnalyzeExperiment, CglmpTable) {
  ExperimentSpec s;
  s.functional = cglmp_functional(4);
  s.ideal = cglmp_reference_model(4);
  s.quantum_max = evaluate(s.functional, born_behavior(s.ideal));
  s.threshold_value = 0.3050;
  s.quoted_normalized_value = 0.9174;
  const StatsReport r = analyze_experiment(load_counts(kData + "/table4.csv"), s);
  EXPECT_NEAR(r.bell_value, 0.3346, 2e-3);
  EXPECT_NEAR(r.normalized_threshold, 0.8356, 1e-3);
  EXPECT_NEAR(r.normalized_value, r.bell_value / r.quantum_max, 1e-12);
  EXPECT_NEAR(r.chernoff.counts, 160000, 1e-9);
  EXPECT_GT(r.chernoff.p_value_bound, 0.0);
  EXPECT_NEAR(r.visibility, 0.9730, 1e-3);
  EXPECT_TRUE(std::isfinite(r.mc_sigma));
}
