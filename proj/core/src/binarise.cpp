#include "hdbell/binarise.hpp"

#include <algorithm>
#include <cmath>

#include "hdbell/error.hpp"

namespace hdbell {

Behavior binarise_behavior(const Behavior& p) {
  const Scenario& s = p.scenario();
  std::vector<std::vector<double>> ma, mb;
  try {
    ma = marginal(p, Party::A, 1e-6);
    mb = marginal(p, Party::B, 1e-6);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::SignalingDetected) throw;
    throw Error(ErrorCode::SignalingInput, e.what());
  }
  const Scenario bs{s.inputs_a * s.outcomes_a, s.inputs_b * s.outcomes_b, 2, 2};
  std::vector<double> v(bs.size());
  for (int x = 0; x < s.inputs_a; ++x) {
    for (int a = 0; a < s.outcomes_a; ++a) {
      const int xi = binarised_input(a, x, s.outcomes_a);
      for (int y = 0; y < s.inputs_b; ++y) {
        for (int b = 0; b < s.outcomes_b; ++b) {
          const int yi = binarised_input(b, y, s.outcomes_b);
          const double pab = p(a, b, x, y);
          const double pa = ma[x][a], pb = mb[y][b];
          v[bs.index(kClick, kClick, xi, yi)] = pab;
          v[bs.index(kClick, kNoClick, xi, yi)] = std::max(pa - pab, 0.0);
          v[bs.index(kNoClick, kClick, xi, yi)] = std::max(pb - pab, 0.0);
          v[bs.index(kNoClick, kNoClick, xi, yi)] = std::max(1.0 - pa - pb + pab, 0.0);
        }
      }
    }
  }
  return Behavior(bs, std::move(v), 1e-6);
}

Behavior binarised_white_noise(const Scenario& multi) {
  return binarise_behavior(Behavior::uniform(multi));
}

LocalityOptions binarised_locality_options() {
  LocalityOptions o;
  o.normalization = WitnessNormalization::Reference;
  return o;
}

namespace {

// Fills in binarised white noise for a reference normalization without one.
LocalityOptions with_noise(LocalityOptions o, const Scenario& multi) {
  if (o.normalization == WitnessNormalization::Reference && !o.noise) {
    o.noise = binarised_white_noise(multi);
  }
  return o;
}

}  // namespace

double binarised_noise_tolerance(const Behavior& p_opt, const NoiseToleranceOptions& opt) {
  if (!(opt.tol_v > 0.0)) throw Error(ErrorCode::InvalidArgument, "noise tolerance: tol_v must be positive");
  const Scenario& s = p_opt.scenario();
  const LocalityOptions lopt = with_noise(opt.locality, s);
  const Behavior u = Behavior::uniform(s);
  const auto local_at = [&](double v) {
    return locality_lp(binarise_behavior(mix_behaviors(p_opt, u, v)), lopt).is_local;
  };
  if (local_at(1.0)) return 1.0;
  double lo = 0.0, hi = 1.0;  // local at lo, nonlocal at hi
  while (hi - lo > opt.tol_v) {
    const double mid = 0.5 * (lo + hi);
    (local_at(mid) ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

std::string to_string(Family f) { return f == Family::Cglmp ? "cglmp" : "satwap"; }

Family family_from_string(const std::string& s) {
  if (s == "cglmp") return Family::Cglmp;
  if (s == "satwap") return Family::Satwap;
  throw Error(ErrorCode::InvalidArgument, "unknown family '" + s + "' (expected cglmp or satwap)");
}

BellFunctional family_functional(Family f, int d) {
  return f == Family::Cglmp ? cglmp_functional(d) : satwap_functional(d);
}

QuantumModel family_reference_model(Family f, int d) {
  return f == Family::Cglmp ? cglmp_reference_model(d) : satwap_reference_model(d);
}

WitnessSuite binarised_witness_suite(Family family, int d, const std::vector<int>& dims,
                                     const SeesawConfig& cfg, const LocalityOptions& lopt) {
  WitnessSuite suite;
  suite.family = family;
  suite.d = d;
  const Behavior p = born_behavior(family_reference_model(family, d));
  const Behavior pb = binarise_behavior(p);
  suite.witness = locality_lp(pb, with_noise(lopt, p.scenario()));
  suite.witness.functional.name = to_string(family) + "_bin_witness";
  suite.ideal_value = suite.witness.value_on_target;
  for (int dim : dims) {
    SeesawConfig c = cfg;
    c.dimension = dim;
    c.minimize = true;
    WitnessSuiteRow row;
    row.dimension = dim;
    row.result = seesaw(suite.witness.functional, c);
    row.value = row.result.value;
    suite.rows.push_back(std::move(row));
  }
  return suite;
}

}  // namespace hdbell
