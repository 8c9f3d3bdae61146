#include "hdbell/functionals.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <sstream>

#include "hdbell/error.hpp"

namespace hdbell {

namespace {

int mod(int v, int d) { return ((v % d) + d) % d; }

}  // namespace

void BellFunctional::validate() const {
  scenario.validate();
  if (coeffs.size() != scenario.size()) {
    throw Error(ErrorCode::DimensionMismatch, "coefficient tensor does not match scenario");
  }
}

BellFunctional BellFunctional::zero(const Scenario& s, double offset) {
  BellFunctional f;
  f.scenario = s;
  f.coeffs.assign(s.size(), 0.0);
  f.offset = offset;
  f.name = "zero";
  return f;
}

BellFunctional cglmp_functional(int d) {
  if (d < 2) throw Error(ErrorCode::InvalidArgument, "CGLMP needs d >= 2");
  BellFunctional f = BellFunctional::zero(Scenario::multi_outcome(d), -2.0);
  f.name = "cglmp";
  f.published_lhv_constant = 2.0;
  for (int a = 0; a < d; ++a) {
    for (int b = 0; b < d; ++b) {
      if (a <= b) f.coeff(a, b, 0, 0) += 1.0;  // P(A1 <= B1)
      if (b <= a) {
        f.coeff(a, b, 1, 0) += 1.0;  // P(B1 <= A2)
        f.coeff(a, b, 0, 1) += 1.0;  // P(B2 <= A1)
        f.coeff(a, b, 1, 1) -= 1.0;  // P(B2 <= A2)
      }
    }
  }
  return f;
}

SatwapCoefficients satwap_coefficients(int d, SatwapConvention convention) {
  if (d < 2) throw Error(ErrorCode::InvalidArgument, "SATWAP needs d >= 2");
  const double pi = std::numbers::pi;
  const auto g = [d, pi](double x) { return 1.0 / std::tan(pi * (x + 0.25) / d); };
  const int half = d / 2;
  const double beta_shift = convention == SatwapConvention::Standard ? 0.75 : 0.5;
  const double scale = 1.0 / (2.0 * d);
  SatwapCoefficients out;
  out.d = d;
  const double g_half = g(half);
  out.g_values.emplace_back(double(half), g_half);
  for (int k = 0; k < half; ++k) {
    const double gk = g(k);
    const double gb = g(k + beta_shift);
    out.g_values.emplace_back(double(k), gk);
    out.g_values.emplace_back(k + beta_shift, gb);
    out.alpha.push_back(scale * (gk - g_half));
    out.beta.push_back(scale * (gb - g_half));
  }
  return out;
}

BellFunctional satwap_functional(int d, SatwapConvention convention) {
  const SatwapCoefficients sc = satwap_coefficients(d, convention);
  BellFunctional f = BellFunctional::zero(Scenario::multi_outcome(d));
  f.name = convention == SatwapConvention::Standard ? "satwap" : "satwap-as-printed";

  // P(A_x = B_y + s): weight on p(j + s, j | x, y).
  const auto a_eq_b_plus = [&](int x, int y, int s, double w) {
    for (int j = 0; j < d; ++j) f.coeff(mod(j + s, d), j, x, y) += w;
  };
  // P(B_y = A_x + s): weight on p(a, a + s | x, y).
  const auto b_eq_a_plus = [&](int x, int y, int s, double w) {
    for (int a = 0; a < d; ++a) f.coeff(a, mod(a + s, d), x, y) += w;
  };
  // sum_i [P(A_i = B_i + s) + P(B_i = A_{i+1} + s)] with A_3 = A_1 + 1.
  const auto correlator = [&](int s, double w) {
    a_eq_b_plus(0, 0, s, w);
    b_eq_a_plus(1, 0, s, w);
    a_eq_b_plus(1, 1, s, w);
    b_eq_a_plus(0, 1, s + 1, w);
  };
  for (int k = 0; k < d / 2; ++k) {
    correlator(k, sc.alpha[k]);
    correlator(-k - 1, -sc.beta[k]);
  }

  if (d == 4) {
    f.published_lhv_constant = 1.798;
    f.offset = -1.798;
  } else {
    f.offset = -raw_local_maximum(f);
  }
  return f;
}

double evaluate(const BellFunctional& f, const Behavior& p) {
  if (!(f.scenario == p.scenario())) {
    throw Error(ErrorCode::ScenarioMismatch, "functional and behavior scenarios differ");
  }
  const auto values = p.values();
  double sum = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) sum += f.coeffs[i] * values[i];
  return sum + f.offset;
}

double critical_visibility(const BellFunctional& f, const Behavior& p_opt,
                           const Behavior& p_noise, double threshold) {
  const double top = evaluate(f, p_opt);
  const double bottom = evaluate(f, p_noise);
  const bool inside = (top >= threshold && threshold >= bottom) ||
                      (top <= threshold && threshold <= bottom);
  if (!inside || top == bottom) {
    std::ostringstream msg;
    msg << "threshold " << threshold << " not between " << bottom << " and " << top;
    throw Error(ErrorCode::ThresholdOutsideRange, msg.str());
  }
  return (threshold - bottom) / (top - bottom);
}

BellFunctional normalize_for_statistics(const BellFunctional& f, NormalizationMode mode,
                                        double quantum_max) {
  const double denom = mode == NormalizationMode::Ratio ? quantum_max : quantum_max - f.offset;
  if (!(denom > 0.0)) {
    throw Error(ErrorCode::MaxNotPositive, "normalizing maximum is " + std::to_string(denom));
  }
  BellFunctional out = f;
  for (double& c : out.coeffs) c /= denom;
  out.offset = mode == NormalizationMode::Ratio ? f.offset / denom : 0.0;
  out.name = f.name + (mode == NormalizationMode::Ratio ? "/ratio" : "/shifted-ratio");
  return out;
}

double raw_local_maximum(const BellFunctional& f) {
  f.validate();
  const Scenario& s = f.scenario;
  const auto count = [](int outcomes, int inputs) {
    double n = std::pow(double(outcomes), inputs);
    if (n > double(1 << 24)) throw Error(ErrorCode::TooLarge, "strategy count exceeds 2^24");
    return static_cast<long long>(n);
  };
  const long long n_a = count(s.outcomes_a, s.inputs_a);
  count(s.outcomes_b, s.inputs_b);
  std::vector<int> out_a(s.inputs_a);
  double best = -std::numeric_limits<double>::infinity();
  for (long long code = 0; code < n_a; ++code) {
    long long c = code;
    for (int x = 0; x < s.inputs_a; ++x) {
      out_a[x] = int(c % s.outcomes_a);
      c /= s.outcomes_a;
    }
    // Bob's best response decouples across his inputs.
    double value = 0.0;
    for (int y = 0; y < s.inputs_b; ++y) {
      double top = -std::numeric_limits<double>::infinity();
      for (int b = 0; b < s.outcomes_b; ++b) {
        double v = 0.0;
        for (int x = 0; x < s.inputs_a; ++x) v += f.coeff(out_a[x], b, x, y);
        top = std::max(top, v);
      }
      value += top;
    }
    best = std::max(best, value);
  }
  return best;
}

}  // namespace hdbell
