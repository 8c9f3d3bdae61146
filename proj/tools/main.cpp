// hdbell: command-line front end.

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hdbell/binarise.hpp"
#include "hdbell/dim_bound.hpp"
#include "hdbell/error.hpp"
#include "hdbell/json_io.hpp"
#include "hdbell/lhv.hpp"
#include "hdbell/seesaw.hpp"
#include "hdbell/stats.hpp"
#include "json_config.hpp"
#include "reproduce.hpp"

#ifndef HDBELL_DATA_DIR
#define HDBELL_DATA_DIR "data"
#endif

namespace fs = std::filesystem;
using namespace hdbell;

namespace {

enum class Format { Text, Json, Csv };

// Everything a command needs, filled by the parser and checked before dispatch.
struct RunConfig {
  std::uint64_t seed = 0;
  double tol_lp = SolverTolerances{}.lp;
  double tol_sdp = SolverTolerances{}.sdp;
  int threads = 1;
  bool json = false;
  bool csv = false;
  std::string data_dir = HDBELL_DATA_DIR;

  // Functional selection.
  std::string family = "cglmp";
  int d = 4;
  std::string functional_file;

  std::string behavior = "reference";
  std::string out;

  int D = 4;
  int d_min = 2;
  int d_max = 4;
  std::vector<int> dims{2, 3, 4};
  int restarts = 50;
  int max_iterations = 500;
  bool minimize = false;
  std::string level = "1+AB";
  bool no_symmetry = false;
  bool binarised = false;
  std::string mode = "multi";
  double tol_v = 1e-4;

  std::string counts;
  std::optional<double> threshold;
  std::optional<double> quoted;
  std::string normalization;
  int trials = 10000;
  double p_target = 1e-30;

  bool quick = false;
  int table1_restarts = 300;

  Format format() const { return json ? Format::Json : csv ? Format::Csv : Format::Text; }

  void validate() const {
    const auto need = [](bool ok, const std::string& what) {
      if (!ok) throw Error(ErrorCode::InvalidArgument, what);
    };
    need(threads >= 1, "--threads must be at least 1");
    need(tol_lp > 0 && tol_sdp > 0, "solver tolerances must be positive");
    need(d >= 2 && d <= 8, "--d must lie in [2, 8]");
    need(restarts >= 1, "--restarts must be positive");
    need(trials >= 2, "--trials must be at least 2");
    need(tol_v > 0 && tol_v < 0.5, "--tol-v must lie in (0, 0.5)");
  }

  SolverTolerances tolerances() const { return {tol_lp, tol_sdp}; }
};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

void print_json(const Json& j) { std::cout << j.dump(2) << '\n'; }

// Data files given by bare name fall back to the bundled data directory.
std::string resolve_data(const RunConfig& c, const std::string& path) {
  if (fs::exists(path)) return path;
  const fs::path bundled = fs::path(c.data_dir) / path;
  if (fs::exists(bundled)) return bundled.string();
  throw Error(ErrorCode::InvalidArgument, "no such file: " + path);
}

BellFunctional load_functional(const RunConfig& c) {
  if (!c.functional_file.empty()) return functional_from_json(load_json_file(resolve_data(c, c.functional_file)));
  return family_functional(family_from_string(c.family), c.d);
}

std::string functional_label(const BellFunctional& f) { return f.name.empty() ? "functional" : f.name; }

// "uniform", "reference", a count CSV, or a behavior JSON document.
Behavior load_behavior(const RunConfig& c, const Scenario& s) {
  if (c.behavior == "uniform") return Behavior::uniform(s);
  if (c.behavior == "reference") {
    if (!c.functional_file.empty())
      throw Error(ErrorCode::InvalidArgument, "--behavior reference needs --family, not --functional");
    return born_behavior(family_reference_model(family_from_string(c.family), c.d));
  }
  const std::string path = resolve_data(c, c.behavior);
  if (fs::path(path).extension() == ".csv") return behavior_from_counts(load_counts(path));
  return behavior_from_json(load_json_file(path));
}

SeesawConfig seesaw_config(const RunConfig& c, int D) {
  SeesawConfig s;
  s.dimension = D;
  s.restarts = c.restarts;
  s.max_iterations = c.max_iterations;
  s.seed = c.seed;
  s.minimize = c.minimize;
  s.threads = c.threads;
  s.sdp.tol = c.tol_sdp;
  s.validate();
  return s;
}

DimBoundOptions dim_options(const RunConfig& c) {
  DimBoundOptions o;
  o.level = monomial_level_from_string(c.level);
  o.seed = c.seed;
  o.threads = c.threads;
  o.use_symmetry = !c.no_symmetry;
  o.sdp.tol = c.tol_sdp;
  o.validate();
  return o;
}

int cmd_eval(const RunConfig& c) {
  const BellFunctional f = load_functional(c);
  const double v = evaluate(f, load_behavior(c, f.scenario));
  switch (c.format()) {
    case Format::Json:
      print_json({{"kind", "eval"}, {"functional", functional_label(f)}, {"behavior", c.behavior}, {"value", v}});
      break;
    case Format::Csv:
      std::cout << "functional,behavior,value\n" << functional_label(f) << ',' << c.behavior << ',' << fmt(v) << '\n';
      break;
    case Format::Text:
      std::cout << functional_label(f) << " on " << c.behavior << ": " << fmt(v) << '\n';
  }
  return 0;
}

int cmd_lhv(const RunConfig& c) {
  const BellFunctional f = load_functional(c);
  const LhvBound b = lhv_bound_report(f);
  if (c.format() == Format::Json) {
    Json j = to_json(b, f.scenario);
    j["functional"] = functional_label(f);
    print_json(j);
    return 0;
  }
  if (c.format() == Format::Csv) {
    std::cout << "functional,lhv_bound,raw_local_maximum,ties\n"
              << functional_label(f) << ',' << fmt(b.value) << ',' << fmt(b.value - f.offset) << ',' << b.ties << '\n';
    return 0;
  }
  std::cout << "local bound: " << fmt(b.value) << "\nraw local maximum (offset removed): " << fmt(b.value - f.offset)
            << "\nmaximizing strategies: " << b.ties << '\n';
  return 0;
}

int cmd_witness(const RunConfig& c) {
  const BellFunctional f = load_functional(c);
  const Behavior p = load_behavior(c, f.scenario);
  LocalityOptions lo;
  lo.tol = c.tol_lp;
  Behavior target = p;
  if (c.binarised) {
    lo = binarised_locality_options();
    lo.tol = c.tol_lp;
    lo.noise = binarised_white_noise(p.scenario());
    target = binarise_behavior(p);
  }
  WitnessReport w = locality_lp(target, lo);
  w.functional.name = (c.binarised ? "binarised_witness_" : "witness_") + c.behavior;
  const Json doc = witness_to_json(w);
  if (!c.out.empty()) save_json_file(c.out, doc);
  if (c.format() == Format::Json) {
    print_json(doc);
  } else if (c.format() == Format::Csv) {
    std::cout << "behavior,binarised,is_local,lp_objective,value_on_target\n"
              << c.behavior << ',' << (c.binarised ? 1 : 0) << ',' << (w.is_local ? 1 : 0) << ','
              << fmt(w.lp_objective) << ',' << fmt(w.value_on_target) << '\n';
  } else {
    std::cout << (w.is_local ? "local" : "nonlocal") << "\nLP objective: " << fmt(w.lp_objective)
              << "\nwitness on target: " << fmt(w.value_on_target) << "\nrounds: " << w.rounds
              << ", columns: " << w.columns << '\n';
    if (!c.out.empty()) std::cout << "witness written to " << c.out << '\n';
  }
  return 0;
}

int cmd_seesaw(const RunConfig& c) {
  const BellFunctional f = load_functional(c);
  const SeesawResult r = seesaw(f, seesaw_config(c, c.D));
  const EigDecomposition e = hermitian_eig(r.model.state);
  const RVector lambda = schmidt_coefficients(e.vectors.col(0), c.D, c.D);
  if (c.format() == Format::Json) {
    Json j = to_json(r);
    j["functional"] = functional_label(f);
    j["dimension"] = c.D;
    j["seed"] = c.seed;
    j["threads"] = c.threads;
    j["schmidt"] = std::vector<double>(lambda.data(), lambda.data() + lambda.size());
    print_json(j);
    return 0;
  }
  if (c.format() == Format::Csv) {
    std::cout << "restart,value\n";
    for (std::size_t k = 0; k < r.restart_values.size(); ++k) std::cout << k << ',' << fmt(r.restart_values[k]) << '\n';
    return 0;
  }
  std::cout << (c.minimize ? "minimum" : "maximum") << " at D=" << c.D << ": " << fmt(r.value) << "\nbest restart: "
            << r.best_restart << " of " << r.restart_values.size() << "\nSchmidt coefficients:";
  for (int k = 0; k < lambda.size(); ++k) std::cout << ' ' << fmt(lambda(k));
  std::cout << '\n';
  if (r.failed_restarts + r.degraded_restarts > 0)
    std::cout << "failed restarts: " << r.failed_restarts << ", degraded: " << r.degraded_restarts << '\n';
  return 0;
}

int cmd_dimbound(const RunConfig& c) {
  const BellFunctional f = load_functional(c);
  const DimBoundReport r = dim_bound_report(f, c.D, dim_options(c));
  if (c.format() == Format::Json) {
    Json j = to_json(r);
    j["functional"] = functional_label(f);
    j["seed"] = c.seed;
    print_json(j);
    return 0;
  }
  if (c.format() == Format::Csv) {
    std::cout << "profile,orbit_size,value,span_dimension,status\n";
    for (const ProfileBound& p : r.profiles)
      std::cout << p.profile.to_string() << ',' << p.orbit_size << ',' << fmt(p.value) << ',' << p.span_dimension
                << ',' << to_string(p.status) << '\n';
    return 0;
  }
  std::cout << "bound at D=" << c.D << " (level " << to_string(r.level) << "): " << fmt(r.value)
            << (r.partial ? "  [partial: " + std::to_string(r.failed_profiles) + " profiles failed]" : "")
            << "\nprofiles solved: " << r.profiles.size() << " (" << r.symmetries << " symmetries)\nbest profile: "
            << r.best_profile.to_string() << "\nmaximizing profiles: " << r.maximizers.size() << '\n';
  return 0;
}

int cmd_bounds(const RunConfig& c) {
  const BellFunctional f = load_functional(c);
  const int dmax = std::min(f.scenario.outcomes_a, f.scenario.outcomes_b);
  struct Line {
    int D;
    double quantum, bound;
    bool partial;
  };
  std::vector<Line> lines;
  for (int D = 1; D <= dmax; ++D) {
    const DimBoundReport r = dim_bound_report(f, D, dim_options(c));
    lines.push_back({D, seesaw(f, seesaw_config(c, D)).value, r.value, r.partial});
  }
  if (c.format() == Format::Json) {
    Json rows = Json::array();
    for (const Line& l : lines) rows.push_back({{"D", l.D}, {"seesaw", l.quantum}, {"dim_bound", l.bound}, {"partial", l.partial}});
    print_json({{"kind", "bounds"}, {"family", c.family}, {"d", c.d}, {"seed", c.seed}, {"rows", rows}});
    return 0;
  }
  if (c.format() == Format::Csv) std::cout << "D,seesaw,dim_bound,partial\n";
  else std::cout << "D  see-saw (lower)  dimension bound (upper)\n";
  for (const Line& l : lines) {
    if (c.format() == Format::Csv) {
      std::cout << l.D << ',' << fmt(l.quantum) << ',' << fmt(l.bound) << ',' << (l.partial ? 1 : 0) << '\n';
    } else {
      std::printf("%d  %-15s  %s%s\n", l.D, fmt(l.quantum).c_str(), fmt(l.bound).c_str(), l.partial ? "  [partial]" : "");
    }
  }
  return 0;
}

int cmd_binarise(const RunConfig& c) {
  const Family fam = family_from_string(c.family);
  LocalityOptions lo = binarised_locality_options();
  lo.tol = c.tol_lp;
  lo.noise = binarised_white_noise(Scenario::multi_outcome(c.d));
  RunConfig sc = c;
  sc.minimize = true;
  const WitnessSuite s = binarised_witness_suite(fam, c.d, c.dims, seesaw_config(sc, 2), lo);
  if (!c.out.empty()) save_json_file(c.out, witness_to_json(s.witness));
  if (c.format() == Format::Json) {
    Json rows = Json::array();
    for (const auto& r : s.rows) rows.push_back({{"D", r.dimension}, {"value", r.value}});
    print_json({{"kind", "witness_suite"}, {"family", c.family}, {"d", c.d}, {"seed", c.seed},
                {"restarts", c.restarts}, {"ideal_value", s.ideal_value}, {"rows", rows}});
    return 0;
  }
  std::cout << "family,d,D,value\n" << c.family << ',' << c.d << ",ideal," << fmt(s.ideal_value) << '\n';
  for (const auto& r : s.rows) std::cout << c.family << ',' << c.d << ',' << r.dimension << ',' << fmt(r.value) << '\n';
  return 0;
}

int cmd_stats(const RunConfig& c) {
  const Family fam = family_from_string(c.family);
  const std::string default_counts = fam == Family::Cglmp ? "table4.csv" : "table5.csv";
  const CountTable t = load_counts(resolve_data(c, c.counts.empty() ? default_counts : c.counts));
  ExperimentSpec spec;
  spec.functional = family_functional(fam, t.scenario.outcomes_a);
  spec.ideal = family_reference_model(fam, t.scenario.outcomes_a);
  spec.quantum_max = evaluate(spec.functional, born_behavior(spec.ideal));
  std::string mode = c.normalization;
  if (mode.empty()) mode = fam == Family::Cglmp ? "ratio" : "shifted-ratio";
  if (mode == "ratio") spec.normalization = NormalizationMode::Ratio;
  else if (mode == "shifted-ratio") spec.normalization = NormalizationMode::ShiftedRatio;
  else throw Error(ErrorCode::InvalidArgument, "--normalization must be ratio or shifted-ratio");
  if (!c.threshold) throw Error(ErrorCode::InvalidArgument, "--threshold is required (the bound to beat)");
  spec.threshold_value = *c.threshold;
  spec.p_target = c.p_target;
  spec.quoted_normalized_value = c.quoted;
  MonteCarloOptions mc;
  mc.trials = c.trials;
  mc.seed = c.seed;
  mc.threads = c.threads;
  const StatsReport r = analyze_experiment(t, spec, mc);
  if (c.format() == Format::Json) {
    Json j = to_json(r);
    j["functional"] = spec.functional.name;
    j["counts_file"] = c.counts.empty() ? default_counts : c.counts;
    j["seed"] = c.seed;
    print_json(j);
    return 0;
  }
  if (c.format() == Format::Csv) {
    std::cout << "bell_value,mc_sigma,normalized_value,normalized_threshold,kl,n_min,log10_p_value_bound,visibility,"
                 "fidelity\n"
              << fmt(r.bell_value) << ',' << fmt(r.mc_sigma) << ',' << fmt(r.normalized_value) << ','
              << fmt(r.normalized_threshold) << ',' << fmt(r.chernoff.kl) << ',' << fmt(r.chernoff.n_min) << ','
              << fmt(r.chernoff.log10_p_value_bound) << ',' << fmt(r.visibility) << ',' << fmt(r.fidelity.fidelity)
              << '\n';
    return 0;
  }
  std::cout << "Bell value: " << fmt(r.bell_value) << " +- " << fmt(r.mc_sigma) << " (" << r.mc_trials
            << " Poisson trials)\nnormalized: " << fmt(r.normalized_value) << " vs threshold "
            << fmt(r.normalized_threshold) << '\n';
  if (r.quoted_normalized_value)
    std::cout << "quoted normalized value " << fmt(*r.quoted_normalized_value) << " differs by more than 5e-4\n";
  std::cout << "KL divergence: " << fmt(r.chernoff.kl) << "\ncounts for p = " << fmt(r.chernoff.p_target) << ": "
            << fmt(r.chernoff.n_min) << "\np-value bound at " << fmt(r.chernoff.counts)
            << " counts: 10^" << fmt(r.chernoff.log10_p_value_bound) << "\nvisibility: " << fmt(r.visibility)
            << "\nmeasurement fidelity: " << fmt(r.fidelity.fidelity) << '\n';
  return 0;
}

int cmd_noise_curve(const RunConfig& c) {
  if (c.mode != "multi" && c.mode != "binarised")
    throw Error(ErrorCode::InvalidArgument, "--mode must be multi or binarised");
  if (c.d_min < 2 || c.d_max > 6 || c.d_min > c.d_max)
    throw Error(ErrorCode::InvalidArgument, "dimensions must satisfy 2 <= d-min <= d-max <= 6");
  const Family fam = family_from_string(c.family);
  struct Point {
    int d;
    double v, quantum, threshold;
  };
  std::vector<Point> pts;
  for (int d = c.d_min; d <= c.d_max; ++d) {
    const BellFunctional f = family_functional(fam, d);
    const SeesawResult r = seesaw(f, seesaw_config(c, d));
    const Behavior p = born_behavior(r.model);
    const double thr = lhv_bound(f);
    double v = 0.0;
    if (c.mode == "multi") {
      v = critical_visibility(f, p, Behavior::uniform(f.scenario), thr);
    } else {
      NoiseToleranceOptions nt;
      nt.tol_v = c.tol_v;
      nt.locality.tol = c.tol_lp;
      v = binarised_noise_tolerance(p, nt);
    }
    pts.push_back({d, v, r.value, thr});
  }
  if (c.format() == Format::Json) {
    Json rows = Json::array();
    for (const Point& p : pts) rows.push_back({{"d", p.d}, {"v_crit", p.v}, {"quantum_value", p.quantum}, {"threshold", p.threshold}});
    print_json({{"kind", "noise_curve"}, {"family", c.family}, {"mode", c.mode}, {"seed", c.seed}, {"rows", rows}});
    return 0;
  }
  std::cout << "d,v_crit\n";
  for (const Point& p : pts) std::cout << p.d << ',' << fmt(p.v) << '\n';
  return 0;
}

int cmd_reproduce(const RunConfig& c) {
  repro::Options o;
  o.quick = c.quick;
  o.seed = c.seed;
  o.threads = c.threads;
  o.tol = c.tolerances();
  o.seesaw_restarts = c.restarts;
  o.table1_restarts = c.table1_restarts;
  o.mc_trials = c.trials;
  o.data_dir = c.data_dir;
  // Fail on bad data before spending minutes on the solvers.
  load_counts(resolve_data(c, "table4.csv"));
  load_counts(resolve_data(c, "table5.csv"));
  if (c.format() == Format::Text) o.progress = [](const std::string& s) { std::cerr << s << '\n'; };
  const repro::Manifest m = repro::run(o);
  const Json j = repro::to_json(m);
  const std::string path = c.out.empty() ? "manifest.json" : c.out;
  save_json_file(path, j);
  if (c.format() == Format::Json) {
    print_json(j);
  } else if (c.format() == Format::Csv) {
    std::cout << "id,criterion,value,expected,tolerance,pass,must_pass\n";
    for (const repro::Row& r : m.rows)
      std::cout << r.id << ',' << r.criterion << ',' << fmt(r.value) << ',' << fmt(r.expected) << ','
                << fmt(r.tolerance) << ',' << (r.pass ? 1 : 0) << ',' << (r.must_pass ? 1 : 0) << '\n';
  } else {
    std::cout << "manifest written to " << path << ": " << (m.passed() ? "all required rows pass" : "FAILURES") << " ("
              << fmt(m.runtime_seconds) << " s)\n";
  }
  return m.passed() ? 0 : 1;
}

void add_functional_options(CLI::App* sub, RunConfig& c) {
  sub->add_option("--family", c.family, "cglmp or satwap")->capture_default_str();
  sub->add_option("--d", c.d, "outcomes per measurement")->capture_default_str();
  sub->add_option("--functional", c.functional_file, "functional JSON file (overrides --family/--d)");
}

}  // namespace

int main(int argc, char** argv) {
  RunConfig c;
  CLI::App app{"Bell tests with high-dimensional entanglement: bounds, witnesses and statistics"};
  app.require_subcommand(1);
  // Global flags are accepted after the subcommand too.
  app.fallthrough();
  app.config_formatter(std::make_shared<cli::JsonConfig>());
  app.set_config("--config", "", "JSON configuration file (flags take precedence)");
  app.add_option("--seed", c.seed, "random seed")->capture_default_str();
  app.add_option("--tol-lp", c.tol_lp, "LP tolerance")->capture_default_str();
  app.add_option("--tol-sdp", c.tol_sdp, "SDP tolerance")->capture_default_str();
  app.add_option("--threads", c.threads, "worker threads")->envname("CLI_THREADS")->capture_default_str();
  auto* json_flag = app.add_flag("--json", c.json, "JSON output (full precision)");
  app.add_flag("--csv", c.csv, "CSV output")->excludes(json_flag);
  app.add_option("--data-dir", c.data_dir, "directory with bundled data")->capture_default_str();

  int (*handler)(const RunConfig&) = nullptr;
  const auto sub = [&](const char* name, const char* help, int (*fn)(const RunConfig&)) {
    CLI::App* s = app.add_subcommand(name, help);
    s->callback([&handler, fn] { handler = fn; });
    return s;
  };

  auto* eval = sub("eval", "evaluate a functional on a behavior", cmd_eval);
  add_functional_options(eval, c);
  eval->add_option("--behavior", c.behavior, "uniform, reference, counts CSV or behavior JSON")->required();

  auto* bounds = sub("bounds", "see-saw and dimension bounds for every D", cmd_bounds);
  add_functional_options(bounds, c);
  bounds->add_option("--restarts", c.restarts)->capture_default_str();
  bounds->add_option("--level", c.level, "moment level: 1, 1+AB or 1+AB+AA")->capture_default_str();

  auto* lhv = sub("lhv", "local bound by enumeration", cmd_lhv);
  add_functional_options(lhv, c);

  auto* witness = sub("witness", "locality LP and witness export", cmd_witness);
  add_functional_options(witness, c);
  witness->add_option("--behavior", c.behavior, "uniform, reference, counts CSV or behavior JSON")->capture_default_str();
  witness->add_flag("--binarised", c.binarised, "binarise the behavior first");
  witness->add_option("--out", c.out, "write the witness JSON here");

  auto* ss = sub("seesaw", "see-saw optimization at fixed dimension", cmd_seesaw);
  add_functional_options(ss, c);
  ss->add_option("--D", c.D, "local dimension")->capture_default_str();
  ss->add_option("--restarts", c.restarts)->capture_default_str();
  ss->add_option("--max-iterations", c.max_iterations)->capture_default_str();
  ss->add_flag("--minimize", c.minimize);

  auto* db = sub("dimbound", "upper bound for D-dimensional entanglement", cmd_dimbound);
  add_functional_options(db, c);
  db->add_option("--D", c.D, "local dimension")->capture_default_str();
  db->add_option("--level", c.level, "moment level: 1, 1+AB or 1+AB+AA")->capture_default_str();
  db->add_flag("--no-symmetry", c.no_symmetry, "solve every profile");

  auto* bin = sub("binarise", "binarised witness and its see-saw minima", cmd_binarise);
  bin->add_option("--family", c.family)->capture_default_str();
  bin->add_option("--d", c.d)->capture_default_str();
  bin->add_option("--dims", c.dims, "dimensions for the see-saw rows")->delimiter(',')->capture_default_str();
  bin->add_option("--restarts", c.restarts)->capture_default_str();
  bin->add_option("--out", c.out, "write the witness JSON here");

  auto* st = sub("stats", "finite-statistics analysis of a count table", cmd_stats);
  st->add_option("--family", c.family)->capture_default_str();
  st->add_option("--counts", c.counts, "count CSV (default: the bundled table for the family)");
  st->add_option("--threshold", c.threshold, "bound to beat, on the functional's scale");
  st->add_option("--quoted", c.quoted, "published normalized value to compare against");
  st->add_option("--normalization", c.normalization, "ratio or shifted-ratio");
  st->add_option("--trials", c.trials, "Monte-Carlo trials")->capture_default_str();
  st->add_option("--p-target", c.p_target)->capture_default_str();

  auto* nc = sub("noise-curve", "critical visibility against d", cmd_noise_curve);
  nc->add_option("--family", c.family)->capture_default_str();
  nc->add_option("--d-min", c.d_min)->capture_default_str();
  nc->add_option("--d-max", c.d_max)->capture_default_str();
  nc->add_option("--mode", c.mode, "multi or binarised")->capture_default_str();
  nc->add_option("--restarts", c.restarts)->capture_default_str();
  nc->add_option("--tol-v", c.tol_v, "bisection tolerance (binarised mode)")->capture_default_str();

  auto* rp = sub("reproduce", "recompute every published number and write a manifest", cmd_reproduce);
  rp->add_flag("--quick", c.quick, "skip dimension bounds and Table I");
  rp->add_option("--out", c.out, "manifest path")->capture_default_str();
  rp->add_option("--restarts", c.restarts)->capture_default_str();
  rp->add_option("--table1-restarts", c.table1_restarts)->capture_default_str();
  rp->add_option("--trials", c.trials)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    c.validate();
    return handler(c);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.code() == ErrorCode::NumericalFailure ? 1 : 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
