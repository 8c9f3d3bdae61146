#include "hdbell/json_io.hpp"

#include <fstream>
#include <sstream>

#include "hdbell/error.hpp"

namespace hdbell {

namespace {

[[noreturn]] void bad(const std::string& what) { throw Error(ErrorCode::ParseError, what); }

const Json& field(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) bad(std::string("missing field '") + key + "'");
  return j.at(key);
}

void expect_kind(const Json& j, const std::string& kind) {
  const Json& k = field(j, "kind");
  if (!k.is_string() || k.get<std::string>() != kind)
    bad("expected a '" + kind + "' document, got " + k.dump());
}

template <class T>
T get(const Json& j, const char* key) {
  try {
    return field(j, key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    bad(std::string("field '") + key + "': " + e.what());
  }
}

Json matrix_json(const RMatrix& m) {
  Json rows = Json::array();
  for (int i = 0; i < m.rows(); ++i) {
    Json r = Json::array();
    for (int k = 0; k < m.cols(); ++k) r.push_back(m(i, k));
    rows.push_back(std::move(r));
  }
  return rows;
}

Json profile_json(const RankProfile& p) {
  return {{"alice", p.ranks[0]}, {"bob", p.ranks[1]}, {"label", p.to_string()}};
}

Json measurement_digest(const MeasurementSet& m) {
  Json inputs = Json::array();
  for (const auto& ops : m) {
    RMatrix g(ops.size(), ops.size());
    for (std::size_t i = 0; i < ops.size(); ++i)
      for (std::size_t k = 0; k < ops.size(); ++k) g(i, k) = (ops[i] * ops[k]).trace().real();
    inputs.push_back(matrix_json(g));
  }
  return inputs;
}

}  // namespace

Json to_json(const Scenario& s) {
  return {{"inputs_a", s.inputs_a}, {"inputs_b", s.inputs_b},
          {"outcomes_a", s.outcomes_a}, {"outcomes_b", s.outcomes_b}};
}

Scenario scenario_from_json(const Json& j) {
  Scenario s{get<int>(j, "inputs_a"), get<int>(j, "inputs_b"), get<int>(j, "outcomes_a"),
             get<int>(j, "outcomes_b")};
  s.validate();
  return s;
}

Json to_json(const StateSpec& s) { return {{"kind", "state"}, {"schmidt", s.schmidt}}; }

StateSpec state_spec_from_json(const Json& j) {
  expect_kind(j, "state");
  return StateSpec{get<std::vector<double>>(j, "schmidt")};
}

Json to_json(const Behavior& p) {
  return {{"kind", "behavior"},
          {"scenario", to_json(p.scenario())},
          {"values", std::vector<double>(p.values().begin(), p.values().end())}};
}

Behavior behavior_from_json(const Json& j) {
  expect_kind(j, "behavior");
  const Scenario s = scenario_from_json(field(j, "scenario"));
  auto v = get<std::vector<double>>(j, "values");
  if (v.size() != s.size())
    bad("behavior has " + std::to_string(v.size()) + " values, scenario needs " + std::to_string(s.size()));
  return Behavior(s, std::move(v));
}

Json to_json(const BellFunctional& f) {
  Json j = {{"kind", "functional"}, {"name", f.name},     {"layout", f.layout},
            {"scenario", to_json(f.scenario)}, {"coeffs", f.coeffs}, {"offset", f.offset}};
  if (f.published_lhv_constant) j["published_lhv_constant"] = *f.published_lhv_constant;
  return j;
}

namespace {

BellFunctional functional_body(const Json& j) {
  BellFunctional f;
  f.scenario = scenario_from_json(field(j, "scenario"));
  f.coeffs = get<std::vector<double>>(j, "coeffs");
  f.offset = get<double>(j, "offset");
  if (j.contains("name")) f.name = get<std::string>(j, "name");
  if (j.contains("layout")) f.layout = get<std::string>(j, "layout");
  if (j.contains("published_lhv_constant")) f.published_lhv_constant = get<double>(j, "published_lhv_constant");
  if (f.coeffs.size() != f.scenario.size())
    bad("functional has " + std::to_string(f.coeffs.size()) + " coefficients, scenario needs " +
        std::to_string(f.scenario.size()));
  f.validate();
  return f;
}

}  // namespace

BellFunctional functional_from_json(const Json& j) {
  const Json& k = field(j, "kind");
  // A witness is a functional; accept it wherever a functional is expected.
  if (k != "functional" && k != "witness") bad("expected a functional document, got " + k.dump());
  return functional_body(j);
}

Json witness_to_json(const WitnessReport& w) {
  Json j = to_json(w.functional);
  j["kind"] = "witness";
  j["lp"] = {{"objective", w.lp_objective},           {"is_local", w.is_local},
             {"value_on_target", w.value_on_target}, {"min_deterministic", w.min_deterministic},
             {"rounds", w.rounds},                   {"columns", w.columns}};
  return j;
}

BellFunctional witness_from_json(const Json& j) {
  expect_kind(j, "witness");
  return functional_body(j);
}

Json to_json(const LhvBound& b, const Scenario& s) {
  return {{"kind", "lhv"},
          {"scenario", to_json(s)},
          {"value", b.value},
          {"ties", b.ties},
          {"maximizer", {{"alice", b.maximizer.out_a}, {"bob", b.maximizer.out_b}}}};
}

Json to_json(const SeesawResult& r) {
  std::vector<int> lengths;
  for (const auto& t : r.trajectories) lengths.push_back(int(t.size()));
  const RVector ev = hermitian_eigenvalues(r.model.state);
  return {{"kind", "seesaw"},
          {"value", r.value},
          {"best_restart", r.best_restart},
          {"restart_values", r.restart_values},
          {"trajectory_lengths", lengths},
          {"failed_restarts", r.failed_restarts},
          {"degraded_restarts", r.degraded_restarts},
          {"model",
           {{"dim", r.model.dim},
            {"state_eigenvalues", std::vector<double>(ev.data(), ev.data() + ev.size())},
            {"gram_a", measurement_digest(r.model.meas_a)},
            {"gram_b", measurement_digest(r.model.meas_b)}}}};
}

Json to_json(const DimBoundReport& r) {
  Json profiles = Json::array();
  for (const ProfileBound& p : r.profiles) {
    profiles.push_back({{"profile", profile_json(p.profile)},
                        {"orbit_size", p.orbit_size},
                        {"value", p.value},
                        {"span_dimension", p.span_dimension},
                        {"reduced_size", p.reduced_size},
                        {"status", std::string(to_string(p.status))},
                        {"primal_residual", p.primal_residual},
                        {"dual_residual", p.dual_residual},
                        {"gap", p.gap},
                        {"min_eigenvalue", p.min_eigenvalue},
                        {"iterations", p.iterations}});
  }
  Json maximizers = Json::array();
  for (const RankProfile& p : r.maximizers) maximizers.push_back(p.to_string());
  return {{"kind", "dim_bound"},
          {"dimension", r.dimension},
          {"level", to_string(r.level)},
          {"value", r.value},
          {"partial", r.partial},
          {"failed_profiles", r.failed_profiles},
          {"best_profile", profile_json(r.best_profile)},
          {"maximizers", maximizers},
          {"symmetries", r.symmetries},
          {"profiles", profiles}};
}

Json to_json(const ChernoffResult& c) {
  return {{"threshold", c.threshold},         {"observed", c.observed},
          {"gap", c.gap},                     {"kl", c.kl},
          {"counts", c.counts},               {"p_value_bound", c.p_value_bound},
          {"log10_p_value_bound", c.log10_p_value_bound},
          {"p_target", c.p_target},           {"n_min", c.n_min}};
}

Json to_json(const StatsReport& r) {
  Json j = {{"kind", "stats"},
            {"bell_value", r.bell_value},
            {"mc_sigma", r.mc_sigma},
            {"mc_trials", r.mc_trials},
            {"quantum_max", r.quantum_max},
            {"normalized_value", r.normalized_value},
            {"normalized_threshold", r.normalized_threshold},
            {"chernoff", to_json(r.chernoff)},
            {"visibility", r.visibility},
            {"fidelity", {{"noise", r.fidelity.noise}, {"fidelity", r.fidelity.fidelity}}}};
  if (r.quoted_normalized_value) j["quoted_normalized_value"] = *r.quoted_normalized_value;
  if (r.assumed_total_per_setting) j["assumed_total_per_setting"] = *r.assumed_total_per_setting;
  return j;
}

Json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) bad("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return Json::parse(ss.str());
  } catch (const nlohmann::json::parse_error& e) {
    bad(path + ": " + e.what());
  }
}

void save_json_file(const std::string& path, const Json& j) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::InvalidArgument, "cannot write " + path);
  out << j.dump(2) << '\n';
}

}  // namespace hdbell
