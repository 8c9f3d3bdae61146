#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "hdbell/error.hpp"
#include "hdbell/functionals.hpp"

using namespace hdbell;

namespace {

// Independent evaluation of the CGLMP expression from its definition.
double cglmp_direct(const Behavior& p, int d) {
  auto le = [&](int x, int y, bool a_le_b) {
    double s = 0.0;
    for (int a = 0; a < d; ++a) {
      for (int b = 0; b < d; ++b) {
        if (a_le_b ? a <= b : b <= a) s += p(a, b, x, y);
      }
    }
    return s;
  };
  return le(0, 0, true) + le(1, 0, false) + le(0, 1, false) - le(1, 1, false) - 2.0;
}

double g(double x, int d) { return 1.0 / std::tan(std::numbers::pi * (x + 0.25) / d); }

Behavior random_behavior(const Scenario& s, Rng& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> v(s.size());
  const int block = s.outcomes_a * s.outcomes_b;
  for (std::size_t i = 0; i < v.size(); i += block) {
    double sum = 0.0;
    for (int k = 0; k < block; ++k) sum += (v[i + k] = u(rng));
    for (int k = 0; k < block; ++k) v[i + k] /= sum;
  }
  return Behavior(s, v);
}

}  // namespace

TEST(Cglmp, UniformValue) {
  EXPECT_NEAR(evaluate(cglmp_functional(4), Behavior::uniform(Scenario::multi_outcome(4))), -0.75,
              1e-14);
}

TEST(Cglmp, UniformClosedFormAcrossDimensions) {
  for (int d = 2; d <= 6; ++d) {
    const double pairs = d * (d + 1) / 2.0;
    const double closed = 2.0 * (pairs / (d * d)) * 2.0 - 2.0 * pairs / (d * d) - 2.0;
    EXPECT_NEAR(evaluate(cglmp_functional(d), Behavior::uniform(Scenario::multi_outcome(d))), closed,
                1e-12);
  }
}

TEST(Cglmp, MatchesDirectDefinition) {
  Rng rng(5);
  for (int d = 2; d <= 5; ++d) {
    for (int trial = 0; trial < 20; ++trial) {
      const Behavior p = random_behavior(Scenario::multi_outcome(d), rng);
      EXPECT_NEAR(evaluate(cglmp_functional(d), p), cglmp_direct(p, d), 1e-12);
    }
  }
}

TEST(Cglmp, ReferenceModelValue) {
  EXPECT_NEAR(evaluate(cglmp_functional(4), born_behavior(cglmp_reference_model(4))), 0.365, 1e-3);
}

TEST(Satwap, CoefficientsFromGenerator) {
  const auto sc = satwap_coefficients(4);
  EXPECT_NEAR(sc.alpha[0], (g(0, 4) - g(2, 4)) / 8.0, 1e-14);
  EXPECT_NEAR(sc.alpha[1], (g(1, 4) - g(2, 4)) / 8.0, 1e-14);
  EXPECT_NEAR(sc.beta[0], (g(0.75, 4) - g(2, 4)) / 8.0, 1e-14);
  const auto printed = satwap_coefficients(4, SatwapConvention::AsPrinted);
  EXPECT_NEAR(printed.beta[1], (g(1.5, 4) - g(2, 4)) / 8.0, 1e-14);
  for (const auto& c : {sc, printed}) {
    EXPECT_GT(c.alpha[0], c.alpha[1]);
    EXPECT_GT(c.beta[0], c.beta[1]);
  }
}

TEST(Satwap, UniformValueIsCoefficientSum) {
  const Behavior u = Behavior::uniform(Scenario::multi_outcome(4));
  for (auto conv : {SatwapConvention::Standard, SatwapConvention::AsPrinted}) {
    const auto sc = satwap_coefficients(4, conv);
    // each P_k and Q_k equals 4 * (1/4) = 1 on the uniform behavior
    const double raw = sc.alpha[0] + sc.alpha[1] - sc.beta[0] - sc.beta[1];
    EXPECT_NEAR(evaluate(satwap_functional(4, conv), u), raw - 1.798, 1e-12);
  }
  EXPECT_NEAR(evaluate(satwap_functional(4, SatwapConvention::AsPrinted), u), -1.298, 1e-3);
}

TEST(Satwap, OffsetIsPublishedConstant) {
  const BellFunctional f = satwap_functional(4);
  EXPECT_DOUBLE_EQ(f.offset, -1.798);
  ASSERT_TRUE(f.published_lhv_constant.has_value());
}

TEST(Evaluate, ZeroFunctionalAndScenarioMismatch) {
  const Scenario s = Scenario::multi_outcome(3);
  Rng rng(1);
  EXPECT_EQ(evaluate(BellFunctional::zero(s), random_behavior(s, rng)), 0.0);
  EXPECT_THROW(evaluate(cglmp_functional(4), Behavior::uniform(s)), Error);
}

TEST(Evaluate, AffineInBehaviorLinearInCoefficients) {
  Rng rng(8);
  const Scenario s = Scenario::multi_outcome(4);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 100; ++trial) {
    BellFunctional f = BellFunctional::zero(s, g(rng));
    BellFunctional h = BellFunctional::zero(s);
    for (auto& c : f.coeffs) c = g(rng);
    for (auto& c : h.coeffs) c = g(rng);
    const Behavior p1 = random_behavior(s, rng), p2 = random_behavior(s, rng);
    const double v = 0.3 + 0.4 * (trial % 2);
    EXPECT_NEAR(evaluate(f, mix_behaviors(p1, p2, v)), v * evaluate(f, p1) + (1 - v) * evaluate(f, p2),
                1e-12);
    BellFunctional sum = f;
    for (std::size_t i = 0; i < sum.coeffs.size(); ++i) sum.coeffs[i] += 2.0 * h.coeffs[i];
    EXPECT_NEAR(evaluate(sum, p1), evaluate(f, p1) + 2.0 * evaluate(h, p1), 1e-12);
  }
}

TEST(CriticalVisibility, PublishedThresholds) {
  const BellFunctional f = cglmp_functional(4);
  const Behavior opt = born_behavior(cglmp_reference_model(4));
  const Behavior u = Behavior::uniform(Scenario::multi_outcome(4));
  EXPECT_NEAR(critical_visibility(f, opt, u, evaluate(f, opt)), 1.0, 1e-14);
  EXPECT_NEAR(critical_visibility(f, opt, u, 0.0), 0.673, 1e-3);
  EXPECT_NEAR(critical_visibility(f, opt, u, 0.305), 0.946, 1e-3);
  EXPECT_THROW(critical_visibility(f, opt, u, 0.5), Error);
}

TEST(NormalizeForStatistics, RatioAndShiftedRatio) {
  const BellFunctional i4 = cglmp_functional(4);
  const BellFunctional r = normalize_for_statistics(i4, NormalizationMode::Ratio, 0.365);
  // value/max on a behavior whose I_4 is 0.305: scale the check through the offset only
  EXPECT_NEAR((0.305 + 2.0) / 0.365 + r.offset, 0.305 / 0.365, 1e-12);
  EXPECT_NEAR(0.305 / 0.365, 0.8356, 1e-4);

  const BellFunctional s4 = satwap_functional(4);
  const BellFunctional sr = normalize_for_statistics(s4, NormalizationMode::ShiftedRatio, 0.3019);
  EXPECT_EQ(sr.offset, 0.0);
  EXPECT_NEAR((0.2117 + 1.798) / (0.3019 + 1.798), 0.9571, 1e-4);
  const Behavior u = Behavior::uniform(Scenario::multi_outcome(4));
  EXPECT_NEAR(evaluate(sr, u), (evaluate(s4, u) + 1.798) / (0.3019 + 1.798), 1e-12);

  const Behavior opt = born_behavior(cglmp_reference_model(4));
  const double max = evaluate(i4, opt);
  EXPECT_NEAR(evaluate(normalize_for_statistics(i4, NormalizationMode::Ratio, max), opt), 1.0, 1e-12);
  EXPECT_NEAR(evaluate(normalize_for_statistics(i4, NormalizationMode::ShiftedRatio, max), opt),
              (max + 2.0) / (max + 2.0), 1e-12);
  EXPECT_THROW(normalize_for_statistics(i4, NormalizationMode::Ratio, 0.0), Error);
}
