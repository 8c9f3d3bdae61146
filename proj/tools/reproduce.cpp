#include "reproduce.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <sstream>

#include "hdbell/binarise.hpp"
#include "hdbell/dim_bound.hpp"
#include "hdbell/error.hpp"
#include "hdbell/lhv.hpp"
#include "hdbell/seesaw.hpp"
#include "hdbell/stats.hpp"

namespace hdbell::repro {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

class Recorder {
 public:
  explicit Recorder(const Options& opt) : opt_(opt) {}

  Row& add(std::string id, int criterion, std::string description, double value, double expected,
           double tolerance, bool must_pass = true) {
    Row r;
    r.id = std::move(id);
    r.criterion = criterion;
    r.description = std::move(description);
    r.value = value;
    r.expected = expected;
    r.tolerance = tolerance;
    r.pass = std::abs(value - expected) <= tolerance;
    r.must_pass = must_pass;
    rows_.push_back(std::move(r));
    if (opt_.progress) {
      const Row& b = rows_.back();
      opt_.progress("[" + std::string(b.pass ? "pass" : b.must_pass ? "FAIL" : "info") + "] " + b.id + " = " +
                    fmt(b.value) + " (expected " + fmt(b.expected) + " +- " + fmt(b.tolerance) + ")");
    }
    return rows_.back();
  }

  /// Property rows: value counts failures, expected zero.
  Row& failures(std::string id, int criterion, std::string description, int count, int checked) {
    Row& r = add(std::move(id), criterion, std::move(description), count, 0.0, 0.0);
    r.note = std::to_string(checked) + " checks";
    return r;
  }

  Row& runtime(std::string id, int criterion, double seconds, double limit) {
    Row& r = add(std::move(id), criterion, "runtime below " + fmt(limit) + " s", seconds, 0.0, limit);
    r.runtime_seconds = seconds;
    return r;
  }

  std::vector<Row> take() { return std::move(rows_); }

 private:
  const Options& opt_;
  std::vector<Row> rows_;
};

SeesawConfig seesaw_config(const Options& opt, int D, int restarts) {
  SeesawConfig c;
  c.dimension = D;
  c.restarts = restarts;
  c.seed = opt.seed;
  c.threads = opt.threads;
  c.sdp.tol = opt.tol.sdp;
  return c;
}

LocalityOptions locality_options(const Options& opt, int d) {
  LocalityOptions o = binarised_locality_options();
  o.noise = binarised_white_noise(Scenario::multi_outcome(d));
  o.tol = opt.tol.lp;
  return o;
}

// Relative tolerance on trajectory increments; the SDP steps are solved to
// tol.sdp, so tiny decreases at that scale are solver noise.
int trajectory_violations(const SeesawResult& r, double slack, int& checked, bool minimize = false) {
  const double sign = minimize ? -1.0 : 1.0;
  int bad = 0;
  for (const auto& t : r.trajectories) {
    for (std::size_t k = 1; k < t.size(); ++k) {
      ++checked;
      if (sign * (t[k] - t[k - 1]) < -slack * (1.0 + std::abs(t[k - 1]))) ++bad;
    }
  }
  return bad;
}

void add_seesaw_residuals(Row& r, const SeesawResult& s) {
  r.residuals["failed_restarts"] = s.failed_restarts;
  r.residuals["degraded_restarts"] = s.degraded_restarts;
}

void add_dim_residuals(Row& r, const DimBoundReport& rep) {
  double primal = 0.0, dual = 0.0, gap = 0.0, min_eig = kInf;
  for (const ProfileBound& p : rep.profiles) {
    primal = std::max(primal, p.primal_residual);
    dual = std::max(dual, p.dual_residual);
    gap = std::max(gap, std::abs(p.gap));
    min_eig = std::min(min_eig, p.min_eigenvalue);
  }
  r.residuals["max_primal_residual"] = primal;
  r.residuals["max_dual_residual"] = dual;
  r.residuals["max_gap"] = gap;
  r.residuals["min_eigenvalue"] = min_eig;
  r.residuals["failed_profiles"] = rep.failed_profiles;
  r.residuals["profiles_solved"] = double(rep.profiles.size());
}

// Random LPs solved by both methods, random SDPs against the eigenvalue oracle.
int solver_duality_checks(const Options& opt, int& checked) {
  Rng rng(derive_seed(opt.seed, 1001));
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  int bad = 0;
  for (int k = 0; k < 20; ++k) {
    const int n = 6 + k % 5, m = 8 + k % 7;
    LinearProgram lp;
    lp.objective = RVector::NullaryExpr(n, [&] { return u(rng); });
    lp.a_ub = RMatrix::NullaryExpr(m, n, [&] { return u(rng); });
    lp.b_ub = RVector::NullaryExpr(m, [&] { return 1.0 + std::abs(u(rng)); });
    lp.a_eq = RMatrix(0, n);
    lp.b_eq = RVector(0);
    lp.lower = RVector::Zero(n);
    lp.upper = RVector::Ones(n);
    LpOptions simplex, ipm;
    simplex.tol = ipm.tol = opt.tol.lp;
    ipm.method = LpMethod::InteriorPoint;
    const SolveReport a = solve_lp(lp, simplex), b = solve_lp(lp, ipm);
    ++checked;
    const double scale = 1.0 + std::abs(a.value);
    if (!a.optimal() || !b.optimal() || std::abs(a.value - b.value) > 1e-6 * scale ||
        std::abs(b.gap) > 1e-6 * scale)
      ++bad;
  }
  for (int k = 0; k < 20; ++k) {
    const int n = 3 + k % 6;
    RMatrix c = RMatrix::NullaryExpr(n, n, [&] { return u(rng); });
    c = (c + c.transpose()).eval();
    // maximize y s.t. C - y I >= 0, i.e. the smallest eigenvalue of C.
    SemidefiniteProgram sdp;
    sdp.block_sizes = {n};
    sdp.f0 = {c};
    sdp.f = {{-RMatrix::Identity(n, n)}};
    sdp.objective = RVector::Ones(1);
    sdp.eq_matrix = RMatrix(0, 1);
    sdp.eq_rhs = RVector(0);
    SdpOptions so;
    so.tol = opt.tol.sdp;
    const SolveReport r = solve_sdp(sdp, so);
    const double oracle = Eigen::SelfAdjointEigenSolver<RMatrix>(c).eigenvalues().minCoeff();
    ++checked;
    if (!r.optimal() || std::abs(r.value - oracle) > 1e-5 || std::abs(r.gap) > 1e-5) ++bad;
  }
  return bad;
}

// Random mixtures of deterministic strategies must be certified local, and no
// functional may exceed its enumerated local bound on them.
int locality_agreement_checks(const Options& opt, int& checked) {
  const Scenario s = Scenario::multi_outcome(3);
  Rng rng(derive_seed(opt.seed, 1002));
  std::normal_distribution<double> g;
  std::uniform_int_distribution<int> outcome(0, 2), terms(1, 6);
  std::gamma_distribution<double> gamma(1.0);
  LocalityOptions lo;
  lo.tol = opt.tol.lp;
  int bad = 0;
  for (int k = 0; k < 100; ++k) {
    std::vector<double> mix(s.size(), 0.0);
    const int t = terms(rng);
    std::vector<double> w(t);
    double total = 0.0;
    for (double& x : w) total += (x = gamma(rng));
    for (int i = 0; i < t; ++i) {
      DeterministicStrategy d{{outcome(rng), outcome(rng)}, {outcome(rng), outcome(rng)}};
      const Behavior det = deterministic_behavior(s, d);
      for (std::size_t c = 0; c < s.size(); ++c) mix[c] += w[i] / total * det.values()[c];
    }
    const Behavior p(s, mix);
    BellFunctional f = BellFunctional::zero(s);
    for (double& c : f.coeffs) c = g(rng);
    ++checked;
    if (!locality_lp(p, lo).is_local || evaluate(f, p) > lhv_bound(f) + 1e-9) ++bad;
  }
  return bad;
}

// Click-click entries reproduce p; binarisation and evaluation are affine.
int binarisation_checks(const Options& opt, int& checked) {
  Rng rng(derive_seed(opt.seed, 1003));
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int bad = 0;
  for (int d = 2; d <= 4; ++d) {
    const Scenario s = Scenario::multi_outcome(d);
    for (int k = 0; k < 5; ++k) {
      const Behavior p1 = born_behavior(random_projective_model(s, d, rng));
      const Behavior p2 = born_behavior(random_projective_model(s, d, rng));
      const double v = u(rng);
      const Behavior b1 = binarise_behavior(p1), b2 = binarise_behavior(p2);
      double err = 0.0;
      for (int x = 0; x < 2; ++x)
        for (int y = 0; y < 2; ++y)
          for (int a = 0; a < d; ++a)
            for (int b = 0; b < d; ++b)
              err = std::max(err, std::abs(b1(kClick, kClick, binarised_input(a, x, d), binarised_input(b, y, d)) -
                                           p1(a, b, x, y)));
      const Behavior lhs = binarise_behavior(mix_behaviors(p1, p2, v));
      const Behavior rhs = mix_behaviors(b1, b2, v);
      for (std::size_t c = 0; c < lhs.values().size(); ++c)
        err = std::max(err, std::abs(lhs.values()[c] - rhs.values()[c]));
      const BellFunctional f = cglmp_functional(d);
      err = std::max(err, std::abs(evaluate(f, mix_behaviors(p1, p2, v)) -
                                   (v * evaluate(f, p1) + (1 - v) * evaluate(f, p2))));
      ++checked;
      if (err > 1e-12 || !b1.is_no_signaling()) ++bad;
    }
  }
  return bad;
}

}  // namespace

bool Manifest::passed() const {
  return std::all_of(rows.begin(), rows.end(), [](const Row& r) { return r.pass || !r.must_pass; });
}

bool Manifest::criterion_passed(int criterion) const {
  return std::all_of(rows.begin(), rows.end(),
                     [&](const Row& r) { return r.criterion != criterion || r.pass || !r.must_pass; });
}

std::string criterion_title(int criterion) {
  switch (criterion) {
    case 1: return "CGLMP optimum at D=4";
    case 2: return "dimension ladder";
    case 3: return "SATWAP optimum and local constant";
    case 4: return "optimal Schmidt spectrum";
    case 5: return "critical visibilities";
    case 6: return "binarised witnesses and Table I";
    case 7: return "experimental Bell values";
    case 8: return "Monte-Carlo errors";
    case 9: return "Chernoff count requirements";
    case 10: return "noise tolerance trends";
    case 11: return "property suites";
  }
  return "unknown";
}

Manifest run(const Options& opt) {
  const auto t_start = Clock::now();
  Recorder rec(opt);
  const BellFunctional i4 = cglmp_functional(4), s4 = satwap_functional(4);
  const Scenario sc4 = Scenario::multi_outcome(4);
  const Behavior uniform4 = Behavior::uniform(sc4);
  std::vector<const SeesawResult*> all_seesaw;
  int mono_checked = 0, mono_bad = 0;

  // Criterion 1 and 4: CGLMP optimum and its state.
  auto t0 = Clock::now();
  const SeesawResult cg = seesaw(i4, seesaw_config(opt, 4, opt.seesaw_restarts));
  const double t_cg = seconds_since(t0);
  add_seesaw_residuals(rec.add("cglmp4.seesaw.D4", 1, "see-saw I4 at D=4", cg.value, 0.365, 1e-3), cg);
  rec.runtime("cglmp4.seesaw.runtime", 1, t_cg, 30.0);
  {
    const EigDecomposition e = hermitian_eig(cg.model.state);
    RVector lambda = schmidt_coefficients(e.vectors.col(0), 4, 4);
    std::sort(lambda.data(), lambda.data() + 4);
    const double quoted[4] = {0.4204, 0.4204, 0.5686, 0.5686};
    double dev = 0.0;
    for (int k = 0; k < 4; ++k) dev = std::max(dev, std::abs(lambda(k) - quoted[k]));
    Row& r = rec.add("cglmp4.schmidt", 4, "max deviation of sorted Schmidt coefficients from (0.4204, 0.4204, 0.5686, 0.5686)",
                     dev, 0.0, 2e-3);
    r.note = "sorted spectrum " + fmt(lambda(0)) + " " + fmt(lambda(1)) + " " + fmt(lambda(2)) + " " + fmt(lambda(3));
  }

  // Criterion 3: SATWAP optimum and local constant.
  t0 = Clock::now();
  const SeesawResult sw = seesaw(s4, seesaw_config(opt, 4, opt.seesaw_restarts));
  add_seesaw_residuals(rec.add("satwap4.seesaw.D4", 3, "see-saw S4 at D=4", sw.value, 0.3019, 1e-3), sw);
  rec.add("satwap4.lhv_constant", 3, "raw local maximum of S4 by enumeration", raw_local_maximum(s4), 1.798, 2e-4)
      .note = "enumeration under the standard coefficient convention";

  // Criterion 5: visibilities against white noise.
  {
    const Behavior opt4 = born_behavior(cglmp_reference_model(4));
    rec.add("cglmp4.vcrit.lhv", 5, "I4 critical visibility, local threshold", critical_visibility(i4, opt4, uniform4, 0.0),
            0.673, 1e-3);
    rec.add("cglmp4.vcrit.D3", 5, "I4 critical visibility, D=3 threshold 0.305",
            critical_visibility(i4, opt4, uniform4, 0.305), 0.946, 1e-3);
    const Behavior opt5 = born_behavior(satwap_reference_model(4));
    const std::string flag =
        "reported only: the quoted S4 visibilities are inconsistent with the affine white-noise formula "
        "given S4 of uniform noise";
    rec.add("satwap4.vcrit.lhv", 5, "S4 critical visibility, local threshold", critical_visibility(s4, opt5, uniform4, 0.0),
            0.691, 1e-3, false)
        .note = flag;
    rec.add("satwap4.vcrit.D3", 5, "S4 critical visibility, D=3 threshold 0.2117",
            critical_visibility(s4, opt5, uniform4, 0.2117), 0.940, 1e-3, false)
        .note = flag;
  }

  // Criterion 6: binarised witnesses and Table I.
  {
    const double quoted_ideal[2] = {-0.186, -0.200};
    const double table1[2][3] = {{-0.2129, -0.2575, -0.2575}, {-0.2094, -0.2532, -0.2532}};
    const Family fams[2] = {Family::Cglmp, Family::Satwap};
    t0 = Clock::now();
    for (int k = 0; k < 2; ++k) {
      const std::string name = to_string(fams[k]);
      if (opt.quick) {
        const Behavior pb = binarise_behavior(born_behavior(family_reference_model(fams[k], 4)));
        rec.add(name + "4.binarised_witness", 6, "binarised witness on the ideal behavior",
                locality_lp(pb, locality_options(opt, 4)).value_on_target, quoted_ideal[k], 2e-3);
        continue;
      }
      const WitnessSuite suite = binarised_witness_suite(fams[k], 4, {2, 3, 4},
                                                         seesaw_config(opt, 2, opt.table1_restarts),
                                                         locality_options(opt, 4));
      rec.add(name + "4.binarised_witness", 6, "binarised witness on the ideal behavior", suite.ideal_value,
              quoted_ideal[k], 2e-3);
      for (std::size_t r = 0; r < suite.rows.size(); ++r) {
        Row& row = rec.add(name + "4.table1.D" + std::to_string(suite.rows[r].dimension), 6,
                           "see-saw minimum of the binarised witness", suite.rows[r].value, table1[k][r], 5e-3);
        add_seesaw_residuals(row, suite.rows[r].result);
        mono_bad += trajectory_violations(suite.rows[r].result, 1e-7, mono_checked, true);
      }
    }
    if (!opt.quick) rec.runtime("table1.runtime", 6, seconds_since(t0), 600.0);
  }

  // Criteria 7 to 9: experimental data.
  {
    const CountTable t4 = load_counts(opt.data_dir + "/table4.csv");
    const CountTable t5 = load_counts(opt.data_dir + "/table5.csv");
    const Behavior p4 = behavior_from_counts(t4), p5 = behavior_from_counts(t5);
    rec.add("table4.I4", 7, "I4 on Table IV", evaluate(i4, p4), 0.3346, 2e-3);
    rec.add("table5.S4", 7, "S4 on Table V", evaluate(s4, p5), 0.2832, 2e-3);

    MonteCarloOptions mc;
    mc.trials = opt.mc_trials;
    mc.seed = opt.seed;
    mc.threads = opt.threads;
    t0 = Clock::now();
    const double sig4 = poisson_mc_error(t4, i4, mc);
    const double t_mc = seconds_since(t0);
    const double sig5 = poisson_mc_error(t5, s4, mc);
    rec.add("table4.mc_sigma", 8, "Poisson Monte-Carlo sigma of I4, in [0.0015, 0.0045]", sig4, 0.003, 0.0015)
        .note = "quoted 0.0030";
    rec.add("table5.mc_sigma", 8, "Poisson Monte-Carlo sigma of S4, in [0.0014, 0.0041]", sig5, 0.00275, 0.00135)
        .note = "quoted 0.0027";
    rec.runtime("mc.runtime", 8, t_mc, 30.0);

    const std::string pair_note = "from the quoted normalized threshold and observation";
    const double n1 = chernoff_analysis(0.8356, 0.9169, 0, 1e-30).n_min;
    const double n2 = chernoff_analysis(0.8356, 0.9169, 0, 1e-300).n_min;
    const double n3 = chernoff_analysis(0.9571, 0.9913, 0, 1e-300).n_min;
    rec.add("chernoff.I4.p1e-30", 9, "counts for p = 1e-30, I4", n1, 2420, 0.02 * 2420).note = pair_note;
    rec.add("chernoff.I4.p1e-300", 9, "counts for p = 1e-300, I4", n2, 24000, 0.05 * 24000).note = pair_note;
    rec.add("chernoff.S4.p1e-300", 9, "counts for p = 1e-300, S4", n3, 33000, 0.02 * 33000).note = pair_note;
  }

  // Criterion 10: noise tolerance against dimension.
  {
    NoiseToleranceOptions nt;
    nt.tol_v = opt.quick ? 1e-3 : 1e-4;
    nt.locality.tol = opt.tol.lp;
    std::vector<double> multi, bin;
    std::vector<SeesawResult> runs;
    for (int d = 2; d <= 4; ++d) {
      const BellFunctional f = cglmp_functional(d);
      const SeesawResult r = d == 4 ? cg : seesaw(f, seesaw_config(opt, d, opt.seesaw_restarts));
      const Behavior p = born_behavior(r.model);
      multi.push_back(critical_visibility(f, p, Behavior::uniform(f.scenario), lhv_bound(f)));
      bin.push_back(binarised_noise_tolerance(p, nt));
      if (d != 4) mono_bad += trajectory_violations(r, 1e-7, mono_checked);
    }
    std::string curve;
    for (int k = 0; k < 3; ++k)
      curve += "d=" + std::to_string(k + 2) + " multi " + fmt(multi[k]) + " binarised " + fmt(bin[k]) + "; ";
    const bool dec = multi[0] > multi[1] && multi[1] > multi[2];
    const bool inc = bin[0] < bin[1] && bin[1] < bin[2];
    rec.add("noise_curve.multi_decreasing", 10, "multi-outcome critical visibility strictly decreasing in d",
            dec ? 1 : 0, 1, 0)
        .note = curve;
    rec.add("noise_curve.binarised_increasing", 10, "binarised critical visibility strictly increasing in d",
            inc ? 1 : 0, 1, 0)
        .note = curve;
    rec.add("noise_curve.d2_agreement", 10, "modes agree at d=2", bin[0] - multi[0], 0.0, 2e-3);
  }

  // Criterion 2: dimension ladder, and the sandwich property on top of it.
  int sandwich_bad = 0, sandwich_checked = 0;
  if (!opt.quick) {
    t0 = Clock::now();
    DimBoundOptions dopt;
    dopt.seed = opt.seed;
    dopt.threads = opt.threads;
    dopt.sdp.tol = opt.tol.sdp;
    const double ladder[2][3] = {{0.207, 0.305, 0.365}, {0.152, 0.212, 0.302}};
    const BellFunctional* fs[2] = {&i4, &s4};
    const SeesawResult* top[2] = {&cg, &sw};
    const char* names[2] = {"cglmp4", "satwap4"};
    for (int k = 0; k < 2; ++k) {
      for (int D = 1; D <= 4; ++D) {
        const DimBoundReport rep = dim_bound_report(*fs[k], D, dopt);
        if (D >= 2) {
          Row& r = rec.add(std::string(names[k]) + ".dim_bound.D" + std::to_string(D), 2,
                           "dimension bound at D=" + std::to_string(D), rep.value, ladder[k][D - 2], 5e-3);
          add_dim_residuals(r, rep);
          if (rep.partial) r.note = "partial: " + std::to_string(rep.failed_profiles) + " profiles failed";
        }
        double quantum = 0.0;
        if (D == 4) {
          quantum = top[k]->value;
        } else {
          const SeesawResult r = seesaw(*fs[k], seesaw_config(opt, D, opt.seesaw_restarts));
          mono_bad += trajectory_violations(r, 1e-7, mono_checked);
          quantum = r.value;
        }
        ++sandwich_checked;
        if (quantum > rep.value + 1e-4) ++sandwich_bad;
      }
    }
    rec.runtime("dim_bound.runtime", 2, seconds_since(t0), 1200.0);
  }

  // Criterion 11: property suites.
  {
    int checked = 0;
    const int bad = solver_duality_checks(opt, checked);
    rec.failures("property.solver_duality", 11, "LP methods agree and SDPs match the eigenvalue oracle with small gap",
                 bad, checked);
  }
  mono_bad += trajectory_violations(cg, 1e-7, mono_checked);
  mono_bad += trajectory_violations(sw, 1e-7, mono_checked);
  rec.failures("property.seesaw_monotone", 11, "see-saw trajectories never decrease", mono_bad, mono_checked);
  if (!opt.quick) {
    rec.failures("property.sandwich", 11, "see-saw value <= dimension bound + 1e-4 for every family and D",
                 sandwich_bad, sandwich_checked);
  }
  {
    int checked = 0;
    const int bad = locality_agreement_checks(opt, checked);
    rec.failures("property.lhv_vs_locality_lp", 11, "random local behaviors certified local and within enumerated bounds",
                 bad, checked);
  }
  {
    int checked = 0;
    const int bad = binarisation_checks(opt, checked);
    rec.failures("property.binarisation", 11, "binarisation round trip and affinity", bad, checked);
  }

  Manifest m;
  m.options = opt;
  m.rows = rec.take();
  m.runtime_seconds = seconds_since(t_start);
  return m;
}

Json to_json(const Manifest& m) {
  Json rows = Json::array();
  for (const Row& r : m.rows) {
    Json j = {{"id", r.id},       {"criterion", r.criterion}, {"description", r.description},
              {"value", r.value}, {"expected", r.expected},   {"tolerance", r.tolerance},
              {"pass", r.pass},   {"must_pass", r.must_pass}};
    if (!r.note.empty()) j["note"] = r.note;
    if (r.runtime_seconds > 0) j["runtime_seconds"] = r.runtime_seconds;
    if (!r.residuals.empty()) j["residuals"] = r.residuals;
    rows.push_back(std::move(j));
  }
  return {{"kind", "manifest"},
          {"quick", m.options.quick},
          {"seed", m.options.seed},
          {"threads", m.options.threads},
          {"tolerances", {{"lp", m.options.tol.lp}, {"sdp", m.options.tol.sdp}}},
          {"passed", m.passed()},
          {"runtime_seconds", m.runtime_seconds},
          {"rows", rows}};
}

}  // namespace hdbell::repro
