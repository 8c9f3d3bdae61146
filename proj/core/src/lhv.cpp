#include "hdbell/lhv.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "hdbell/error.hpp"

namespace hdbell {

std::uint64_t party_strategy_count(int inputs, int outcomes) {
  std::uint64_t n = 1;
  for (int i = 0; i < inputs; ++i) {
    n *= std::uint64_t(outcomes);
    if (n > kMaxStrategiesPerParty) {
      throw Error(ErrorCode::TooLarge, std::to_string(outcomes) + "^" + std::to_string(inputs) +
                                           " strategies exceed the 2^24 guard");
    }
  }
  return n;
}

std::vector<int> decode_strategy(std::uint64_t code, int inputs, int outcomes) {
  std::vector<int> out(inputs);
  for (int x = 0; x < inputs; ++x) {
    out[x] = int(code % std::uint64_t(outcomes));
    code /= std::uint64_t(outcomes);
  }
  return out;
}

StrategyRange::StrategyRange(const Scenario& s)
    : scenario_(s),
      count_a_(party_strategy_count(s.inputs_a, s.outcomes_a)),
      count_b_(party_strategy_count(s.inputs_b, s.outcomes_b)) {
  s.validate();
}

DeterministicStrategy StrategyRange::iterator::operator*() const {
  const Scenario& s = range_->scenario_;
  return {decode_strategy(code_ / range_->count_b_, s.inputs_a, s.outcomes_a),
          decode_strategy(code_ % range_->count_b_, s.inputs_b, s.outcomes_b)};
}

StrategyRange enumerate_strategies(const Scenario& s) { return StrategyRange(s); }

Behavior deterministic_behavior(const Scenario& s, const DeterministicStrategy& d) {
  std::vector<double> v(s.size(), 0.0);
  for (int x = 0; x < s.inputs_a; ++x) {
    for (int y = 0; y < s.inputs_b; ++y) v[s.index(d.out_a[x], d.out_b[y], x, y)] = 1.0;
  }
  return Behavior(s, std::move(v));
}

double strategy_value(const BellFunctional& f, const DeterministicStrategy& d) {
  double v = 0.0;
  for (int x = 0; x < f.scenario.inputs_a; ++x) {
    for (int y = 0; y < f.scenario.inputs_b; ++y) v += f.coeff(d.out_a[x], d.out_b[y], x, y);
  }
  return v;
}

namespace {

// For a fixed Alice strategy, Bob's inputs decouple: table[y][b] holds
// sum_x c(out_a[x], b | x, y).
struct BestResponse {
  double value;
  std::vector<int> out_b;
  std::uint64_t ties;
};

BestResponse best_response(const Scenario& s, std::span<const double> c,
                           const std::vector<int>& out_a, bool maximize, double tie_tol) {
  BestResponse r{0.0, std::vector<int>(s.inputs_b), 1};
  for (int y = 0; y < s.inputs_b; ++y) {
    double best = maximize ? -kInf : kInf;
    std::uint64_t count = 0;
    for (int b = 0; b < s.outcomes_b; ++b) {
      double v = 0.0;
      for (int x = 0; x < s.inputs_a; ++x) v += c[s.index(out_a[x], b, x, y)];
      const bool better = maximize ? v > best + tie_tol : v < best - tie_tol;
      if (better) {
        best = v;
        r.out_b[y] = b;
        count = 1;
      } else if (std::abs(v - best) <= tie_tol) {
        ++count;
      }
    }
    r.value += best;
    r.ties *= count;
  }
  return r;
}

}  // namespace

LhvBound lhv_bound_report(const BellFunctional& f) {
  f.validate();
  const Scenario& s = f.scenario;
  const std::uint64_t na = party_strategy_count(s.inputs_a, s.outcomes_a);
  party_strategy_count(s.inputs_b, s.outcomes_b);
  const double tie_tol = 1e-12;
  LhvBound out;
  out.value = -kInf;
  for (std::uint64_t code = 0; code < na; ++code) {
    std::vector<int> out_a = decode_strategy(code, s.inputs_a, s.outcomes_a);
    BestResponse br = best_response(s, f.coeffs, out_a, true, tie_tol);
    if (br.value > out.value + tie_tol) {
      out.value = br.value;
      out.ties = br.ties;
      out.maximizer = {std::move(out_a), std::move(br.out_b)};
    } else if (std::abs(br.value - out.value) <= tie_tol) {
      out.ties += br.ties;
    }
  }
  out.value += f.offset;
  return out;
}

double lhv_bound(const BellFunctional& f) { return lhv_bound_report(f).value; }

WitnessReport locality_lp(const Behavior& p, const LocalityOptions& opt) {
  const Scenario& s = p.scenario();
  const std::uint64_t na = party_strategy_count(s.inputs_a, s.outcomes_a);
  party_strategy_count(s.inputs_b, s.outcomes_b);
  const int n = int(s.size());
  double kappa = 1.0 / double(s.size());
  if (opt.normalization == WitnessNormalization::UniformBehavior) {
    kappa = 1.0 / (s.outcomes_a * s.outcomes_b);
  } else if (opt.normalization == WitnessNormalization::InputsOnly) {
    kappa = 1.0 / (s.inputs_a * s.inputs_b);
  }

  RVector target(n);
  for (int i = 0; i < n; ++i) target(i) = p.values()[i];
  RVector noise = RVector::Constant(n, kappa);
  if (opt.normalization == WitnessNormalization::Reference) {
    if (!opt.noise) throw Error(ErrorCode::InvalidArgument, "locality LP: reference noise missing");
    if (!(opt.noise->scenario() == s)) {
      throw Error(ErrorCode::ScenarioMismatch, "locality LP: noise reference scenario differs");
    }
    for (int i = 0; i < n; ++i) noise(i) = opt.noise->values()[i];
    // An input-independent reference is a mixture of the constant strategies
    // seeded below, which keeps mu = -1 feasible.
    const int block = s.outcomes_a * s.outcomes_b;
    for (int i = block; i < n; ++i) {
      if (std::abs(noise(i) - noise(i % block)) > 1e-9) {
        throw Error(ErrorCode::InvalidArgument, "locality LP: reference noise depends on the inputs");
      }
    }
  }
  const RVector mu_col = noise - target;

  WitnessReport rep;
  rep.functional = BellFunctional::zero(s);
  rep.functional.name = "witness";
  rep.functional.layout = (s.outcomes_a == 2 && s.inputs_a > 2) ? "binarised" : "multi";
  if (mu_col.cwiseAbs().maxCoeff() <= 1e-12) {
    // p is the reference itself, which is local; the program is unbounded.
    rep.lp_objective = kInf;
    return rep;
  }

  // Strategies constant across inputs make mu = -1 feasible from the start.
  std::vector<DeterministicStrategy> columns;
  for (int ka = 0; ka < s.outcomes_a; ++ka) {
    for (int kb = 0; kb < s.outcomes_b; ++kb) {
      columns.push_back({std::vector<int>(s.inputs_a, ka), std::vector<int>(s.inputs_b, kb)});
    }
  }
  const auto column_vector = [&](const DeterministicStrategy& d) {
    RVector v = RVector::Zero(n);
    for (int x = 0; x < s.inputs_a; ++x) {
      for (int y = 0; y < s.inputs_b; ++y) v(s.index(d.out_a[x], d.out_b[y], x, y)) = 1.0;
    }
    return v;
  };

  LpOptions lp_opt;
  lp_opt.tol = opt.tol;
  lp_opt.method = LpMethod::InteriorPoint;
  RVector y;
  double mu = 0.0;
  for (int round = 0;; ++round) {
    if (round >= opt.max_rounds) {
      throw Error(ErrorCode::NumericalFailure, "locality LP: column generation did not converge");
    }
    const int k = int(columns.size());
    LinearProgram lp;
    lp.objective = RVector::Zero(k + 1);
    lp.objective(k) = 1.0;
    lp.a_eq.resize(n, k + 1);
    for (int j = 0; j < k; ++j) lp.a_eq.col(j) = column_vector(columns[j]);
    lp.a_eq.col(k) = mu_col;
    lp.b_eq = target;
    // mu = -1 is feasible with the initial columns, so the bound never cuts
    // off the optimum; it spares the solver a free variable.
    lp.lower = RVector::Zero(k + 1);
    lp.lower(k) = -1.0;
    SolveReport sol = solve_lp(lp, lp_opt);
    if (sol.status == SolveStatus::MaxIterations) {
      // The interior point method occasionally stalls on degenerate masters;
      // the simplex path is slower here but handles them.
      LpOptions retry = lp_opt;
      retry.method = LpMethod::Simplex;
      retry.max_pivots = 0;
      sol = solve_lp(lp, retry);
    }
    rep.rounds = round + 1;
    rep.columns = k;
    if (sol.status == SolveStatus::Unbounded) {
      // p lies strictly inside the local set along the noise direction.
      rep.lp_objective = kInf;
      rep.is_local = true;
      rep.value_on_target = 0.0;
      rep.min_deterministic = 0.0;
      return rep;
    }
    if (!sol.optimal()) {
      throw Error(ErrorCode::NumericalFailure,
                  std::string("locality LP master: ") + std::string(to_string(sol.status)));
    }
    y = sol.dual;
    mu = sol.value;

    // Pricing: most negative c.D over all strategies, one per Alice strategy.
    const double threshold = -opt.tol * (1.0 + y.cwiseAbs().maxCoeff());
    std::vector<std::pair<double, DeterministicStrategy>> found;
    const std::span<const double> yv(y.data(), std::size_t(n));
    for (std::uint64_t code = 0; code < na; ++code) {
      std::vector<int> out_a = decode_strategy(code, s.inputs_a, s.outcomes_a);
      BestResponse br = best_response(s, yv, out_a, false, 0.0);
      if (br.value < threshold) found.push_back({br.value, {std::move(out_a), std::move(br.out_b)}});
    }
    if (found.empty()) break;
    const std::size_t keep = std::min<std::size_t>(found.size(), opt.columns_per_round);
    std::partial_sort(found.begin(), found.begin() + keep, found.end(),
                      [](const auto& l, const auto& r) { return l.first < r.first; });
    for (std::size_t i = 0; i < keep; ++i) columns.push_back(std::move(found[i].second));
  }

  for (int i = 0; i < n; ++i) rep.functional.coeffs[i] = y(i);
  rep.lp_objective = 1.0 + mu;
  // Behaviors on the boundary come out at 1 up to the solver tolerance.
  rep.is_local = rep.lp_objective >= 1.0 - 10.0 * opt.tol;
  rep.value_on_target = evaluate(rep.functional, p);

  // Re-verify positivity on every deterministic strategy.
  double lo = kInf;
  for (std::uint64_t code = 0; code < na; ++code) {
    const std::vector<int> out_a = decode_strategy(code, s.inputs_a, s.outcomes_a);
    lo = std::min(lo, best_response(s, rep.functional.coeffs, out_a, false, 0.0).value);
  }
  rep.min_deterministic = lo;
  return rep;
}

double witness_value(const WitnessReport& report, const Behavior& p) {
  return evaluate(report.functional, p);
}

}  // namespace hdbell
