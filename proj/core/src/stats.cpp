#include "hdbell/stats.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "hdbell/error.hpp"

namespace hdbell {

namespace {

constexpr double kBlockSumTolerance = 1e-3;
constexpr int kTrialsPerStream = 256;

[[noreturn]] void parse_error(int line, int column, const std::string& what) {
  std::ostringstream os;
  os << "line " << line << ", column " << column << ": " << what;
  throw Error(ErrorCode::ParseError, os.str());
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::ParseError, "cannot open " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream is(line);
  while (std::getline(is, field, sep)) out.push_back(field);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
}

double parse_number(const std::string& field, int line, int column) {
  const std::string t = trim(field);
  if (t.empty()) parse_error(line, column, "empty field");
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(t, &used);
  } catch (const std::exception&) {
    parse_error(line, column, "not a number: '" + t + "'");
  }
  if (used != t.size() || !std::isfinite(v)) parse_error(line, column, "not a number: '" + t + "'");
  return v;
}

int parse_index(const std::string& field, int line, int column) {
  const double v = parse_number(field, line, column);
  if (v != std::floor(v)) parse_error(line, column, "expected an integer");
  return int(v);
}

void normalize_blocks(const Scenario& s, std::vector<double>& v) {
  const int block = s.outcomes_a * s.outcomes_b;
  for (std::size_t start = 0; start < v.size(); start += block) {
    double sum = 0.0;
    for (int k = 0; k < block; ++k) sum += v[start + k];
    if (!(sum > 0.0)) throw Error(ErrorCode::ZeroBlock, "a measurement block has no counts");
    for (int k = 0; k < block; ++k) v[start + k] /= sum;
  }
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

}  // namespace

std::string to_string(CountKind k) { return k == CountKind::RawCounts ? "raw" : "normalized"; }

void CountTable::validate() const {
  scenario.validate();
  if (values.size() != scenario.size()) {
    throw Error(ErrorCode::DimensionMismatch, "count table size does not match its scenario");
  }
  for (double v : values) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw Error(ErrorCode::ParseError, "count table has a negative entry");
  }
  if (kind == CountKind::NormalizedFrequencies) {
    for (int x = 0; x < scenario.inputs_a; ++x) {
      for (int y = 0; y < scenario.inputs_b; ++y) {
        const double s = block_sum(x, y);
        if (std::abs(s - 1.0) > kBlockSumTolerance) {
          std::ostringstream os;
          os << "block (x=" << x + 1 << ", y=" << y + 1 << ") sums to " << s;
          throw Error(ErrorCode::NotNormalized, os.str());
        }
      }
    }
  }
  if (assumed_total_per_setting && !(*assumed_total_per_setting > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "assumed_total_per_setting must be positive");
  }
}

double CountTable::block_sum(int x, int y) const {
  double s = 0.0;
  for (int a = 0; a < scenario.outcomes_a; ++a)
    for (int b = 0; b < scenario.outcomes_b; ++b) s += values[scenario.index(a, b, x, y)];
  return s;
}

CountTable parse_counts(const std::string& csv_text, const std::string& sidecar_json) {
  std::optional<int> d;
  std::optional<CountKind> kind;
  std::optional<double> totals;
  if (!trim(sidecar_json).empty()) {
    nlohmann::json meta;
    try {
      meta = nlohmann::json::parse(sidecar_json);
      if (meta.contains("d")) d = meta.at("d").get<int>();
      if (meta.contains("kind")) {
        const std::string k = meta.at("kind").get<std::string>();
        if (k == "raw" || k == "raw-counts") kind = CountKind::RawCounts;
        else if (k == "normalized" || k == "normalized-frequencies") kind = CountKind::NormalizedFrequencies;
        else throw Error(ErrorCode::ParseError, "sidecar: unknown kind '" + k + "'");
      }
      if (meta.contains("assumed_total_per_setting") && !meta.at("assumed_total_per_setting").is_null()) {
        totals = meta.at("assumed_total_per_setting").get<double>();
      }
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::ParseError, std::string("sidecar: ") + e.what());
    }
    if (d && (*d < 2 || *d > 64)) throw Error(ErrorCode::ParseError, "sidecar: d out of range");
  }

  struct Row {
    int x, y, a, b;
    double v;
    int line;
  };
  std::vector<Row> rows;
  std::istringstream in(csv_text);
  std::string line;
  int lineno = 0;
  bool header = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    const std::vector<std::string> f = split(trim(line), ',');
    if (!header) {
      const std::vector<std::string> want{"x", "y", "a", "b", "value"};
      if (f.size() != want.size()) parse_error(lineno, 1, "header must be x,y,a,b,value");
      for (std::size_t i = 0; i < want.size(); ++i) {
        if (trim(f[i]) != want[i]) parse_error(lineno, int(i) + 1, "header must be x,y,a,b,value");
      }
      header = true;
      continue;
    }
    if (f.size() != 5) parse_error(lineno, int(std::min<std::size_t>(f.size(), 5)) + 1, "expected 5 fields");
    Row r{parse_index(f[0], lineno, 1), parse_index(f[1], lineno, 2), parse_index(f[2], lineno, 3),
          parse_index(f[3], lineno, 4), parse_number(f[4], lineno, 5), lineno};
    if (r.x != 1 && r.x != 2) parse_error(lineno, 1, "x must be 1 or 2");
    if (r.y != 1 && r.y != 2) parse_error(lineno, 2, "y must be 1 or 2");
    if (r.a < 0) parse_error(lineno, 3, "a must be nonnegative");
    if (r.b < 0) parse_error(lineno, 4, "b must be nonnegative");
    if (r.v < 0.0) parse_error(lineno, 5, "value must be nonnegative");
    rows.push_back(r);
  }
  if (!header) throw Error(ErrorCode::ParseError, "line 1, column 1: missing header");

  if (!d) {
    int top = 0;
    for (const Row& r : rows) top = std::max({top, r.a, r.b});
    d = top + 1;
    if (*d < 2) throw Error(ErrorCode::IncompleteTable, "fewer than two outcomes present");
  }
  if (!kind) {
    const bool integral = std::all_of(rows.begin(), rows.end(), [](const Row& r) { return r.v == std::floor(r.v); });
    kind = integral ? CountKind::RawCounts : CountKind::NormalizedFrequencies;
  }

  CountTable t;
  t.scenario = Scenario::multi_outcome(*d);
  t.kind = *kind;
  t.assumed_total_per_setting = totals;
  t.values.assign(t.scenario.size(), 0.0);
  std::vector<char> seen(t.scenario.size(), 0);
  for (const Row& r : rows) {
    if (r.a >= *d) parse_error(r.line, 3, "a out of range for d = " + std::to_string(*d));
    if (r.b >= *d) parse_error(r.line, 4, "b out of range for d = " + std::to_string(*d));
    const std::size_t i = t.scenario.index(r.a, r.b, r.x - 1, r.y - 1);
    if (seen[i]) parse_error(r.line, 1, "duplicate cell");
    seen[i] = 1;
    t.values[i] = r.v;
  }
  const auto missing = std::find(seen.begin(), seen.end(), 0);
  if (missing != seen.end()) {
    throw Error(ErrorCode::IncompleteTable, std::to_string(std::count(seen.begin(), seen.end(), 0)) +
                                                " of " + std::to_string(seen.size()) + " cells missing");
  }
  t.validate();
  return t;
}

CountTable load_counts(const std::string& path) {
  const std::string csv = read_file(path);
  std::string sidecar;
  const auto dot = path.find_last_of('.');
  const std::string stem = dot == std::string::npos ? path : path.substr(0, dot);
  if (std::ifstream(stem + ".json")) sidecar = read_file(stem + ".json");
  return parse_counts(csv, sidecar);
}

void save_counts(const std::string& path, const CountTable& t) {
  t.validate();
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::InvalidArgument, "cannot write " + path);
  out.precision(17);
  out << "x,y,a,b,value\n";
  const Scenario& s = t.scenario;
  for (int x = 0; x < s.inputs_a; ++x)
    for (int y = 0; y < s.inputs_b; ++y)
      for (int a = 0; a < s.outcomes_a; ++a)
        for (int b = 0; b < s.outcomes_b; ++b) {
          out << x + 1 << ',' << y + 1 << ',' << a << ',' << b << ',' << t.values[s.index(a, b, x, y)] << '\n';
        }
}

Behavior behavior_from_counts(const CountTable& t) {
  t.validate();
  std::vector<double> v = t.values;
  normalize_blocks(t.scenario, v);
  return Behavior(t.scenario, std::move(v));
}

CountTable counts_from_behavior(const Behavior& p, double total_per_setting) {
  if (!(total_per_setting > 0.0)) throw Error(ErrorCode::InvalidArgument, "total per setting must be positive");
  CountTable t;
  t.scenario = p.scenario();
  t.kind = CountKind::RawCounts;
  for (double v : p.values()) t.values.push_back(std::round(v * total_per_setting));
  return t;
}

double poisson_mc_error(const CountTable& t, const BellFunctional& f, const MonteCarloOptions& opt) {
  t.validate();
  f.validate();
  if (!(f.scenario == t.scenario)) throw Error(ErrorCode::ScenarioMismatch, "functional and table scenarios differ");
  if (opt.trials < 2) throw Error(ErrorCode::InvalidArgument, "Monte-Carlo needs at least 2 trials");
  if (opt.threads < 1) throw Error(ErrorCode::InvalidArgument, "threads must be >= 1");

  std::vector<double> means = t.values;
  if (t.kind == CountKind::NormalizedFrequencies) {
    if (!t.assumed_total_per_setting) {
      throw Error(ErrorCode::MissingTotals, "normalized table needs assumed_total_per_setting");
    }
    normalize_blocks(t.scenario, means);
    for (double& m : means) m *= *t.assumed_total_per_setting;
  }
  if (opt.regularize) {
    for (double& m : means) m += 0.5;
  }

  // Trials are grouped into fixed streams so results do not depend on threads.
  const int streams = (opt.trials + kTrialsPerStream - 1) / kTrialsPerStream;
  std::vector<double> values(opt.trials);
  std::atomic<int> next{0};
  const auto worker = [&] {
    std::vector<double> sample(means.size());
    for (int st = next++; st < streams; st = next++) {
      Rng rng(derive_seed(opt.seed, std::uint64_t(st)));
      const int end = std::min(opt.trials, (st + 1) * kTrialsPerStream);
      for (int k = st * kTrialsPerStream; k < end; ++k) {
        for (std::size_t i = 0; i < means.size(); ++i) {
          sample[i] = means[i] > 0.0 ? double(std::poisson_distribution<long long>(means[i])(rng)) : 0.0;
        }
        normalize_blocks(t.scenario, sample);
        values[k] = dot(f.coeffs, sample) + f.offset;
      }
    }
  };
  const int threads = std::min(opt.threads, streams);
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int i = 0; i < threads; ++i) pool.emplace_back(worker);
    for (std::thread& th : pool) th.join();
  }

  // Shifted two-pass variance; constant samples give exactly zero.
  const double ref = values.front();
  double mean = 0.0;
  for (double& v : values) mean += (v -= ref);
  mean /= opt.trials;
  double var = 0.0;
  for (double v : values) var += (v - mean) * (v - mean);
  return std::sqrt(var / (opt.trials - 1));
}

double kl_divergence(double x, double y) {
  if (!(x > 0.0 && x < 1.0 && y > 0.0 && y < 1.0)) {
    throw Error(ErrorCode::DomainError, "KL divergence needs both arguments in (0, 1)");
  }
  const double d = x * std::log(x / y) + (1.0 - x) * std::log((1.0 - x) / (1.0 - y));
  return std::max(d, 0.0);
}

ChernoffResult chernoff_analysis(double normalized_threshold, double normalized_observed, double counts,
                                 double p_target) {
  if (!(normalized_threshold > 0.0 && normalized_threshold < normalized_observed && normalized_observed < 1.0)) {
    throw Error(ErrorCode::DomainError, "Chernoff analysis needs 0 < threshold < observed < 1");
  }
  if (!(counts >= 0.0)) throw Error(ErrorCode::DomainError, "counts must be nonnegative");
  if (!(p_target > 0.0 && p_target < 1.0)) throw Error(ErrorCode::DomainError, "p_target must lie in (0, 1)");
  ChernoffResult r;
  r.threshold = normalized_threshold;
  r.observed = normalized_observed;
  r.gap = normalized_observed - normalized_threshold;
  r.kl = kl_divergence(normalized_observed, normalized_threshold);
  r.counts = counts;
  r.log10_p_value_bound = -r.kl * counts / std::log(10.0);
  r.p_value_bound = std::max(std::exp(-r.kl * counts), std::numeric_limits<double>::denorm_min());
  r.p_target = p_target;
  r.n_min = std::log(1.0 / p_target) / r.kl;
  return r;
}

double visibility_report(const BellFunctional& f, const Behavior& p_exp, const Behavior& p_opt,
                         const Behavior& p_noise) {
  const double e = evaluate(f, p_exp), o = evaluate(f, p_opt), n = evaluate(f, p_noise);
  if (o == n) throw Error(ErrorCode::ThresholdOutsideRange, "optimal and noise values coincide");
  const double v = (e - n) / (o - n);
  if (!(v > 0.0 && v <= 1.0 + 1e-9)) {
    throw Error(ErrorCode::ThresholdOutsideRange, "visibility " + std::to_string(v) + " outside (0, 1]");
  }
  return v;
}

QuantumModel noisy_measurements(const QuantumModel& m, double mu) {
  QuantumModel out = m;
  for (MeasurementSet* set : {&out.meas_a, &out.meas_b}) {
    for (auto& povm : *set) {
      const double share = 1.0 / double(povm.size());
      for (CMatrix& op : povm) {
        op = (1.0 - mu) * op + mu * share * CMatrix::Identity(op.rows(), op.cols());
      }
    }
  }
  out.projective = mu == 0.0 && m.projective;
  return out;
}

FidelityFit measurement_fidelity_fit(const BellFunctional& f, const QuantumModel& ideal, double observed,
                                     double tol) {
  const auto value = [&](double mu) { return evaluate(f, born_behavior(noisy_measurements(ideal, mu))); };
  double lo = 0.0, hi = 1.0;
  const double top = value(lo), bottom = value(hi);
  if (!(observed <= top && observed >= bottom)) {
    std::ostringstream os;
    os << "observed value " << observed << " not between " << bottom << " and " << top;
    throw Error(ErrorCode::ThresholdOutsideRange, os.str());
  }
  // The value falls as noise grows; keep value(lo) >= observed >= value(hi).
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    (value(mid) >= observed ? lo : hi) = mid;
  }
  FidelityFit fit;
  fit.noise = 0.5 * (lo + hi);
  fit.fidelity = 1.0 - fit.noise;
  return fit;
}

StatsReport analyze_experiment(const CountTable& t, const ExperimentSpec& spec, const MonteCarloOptions& mc) {
  const BellFunctional& f = spec.functional;
  const Behavior p = behavior_from_counts(t);
  StatsReport r;
  r.bell_value = evaluate(f, p);
  r.assumed_total_per_setting = t.assumed_total_per_setting;
  r.mc_sigma = poisson_mc_error(t, f, mc);
  r.mc_trials = mc.trials;
  r.quantum_max = spec.quantum_max;

  const BellFunctional hat = normalize_for_statistics(f, spec.normalization, spec.quantum_max);
  r.normalized_value = evaluate(hat, p);
  const double shift = spec.normalization == NormalizationMode::Ratio ? 0.0 : f.offset;
  r.normalized_threshold = (spec.threshold_value - shift) / (spec.quantum_max - shift);
  if (spec.quoted_normalized_value && std::abs(*spec.quoted_normalized_value - r.normalized_value) > 5e-4) {
    r.quoted_normalized_value = spec.quoted_normalized_value;
  }

  double counts = 0.0;
  if (spec.counts) {
    counts = *spec.counts;
  } else if (t.kind == CountKind::RawCounts) {
    for (double v : t.values) counts += v;
  } else if (t.assumed_total_per_setting) {
    counts = *t.assumed_total_per_setting * t.scenario.inputs_a * t.scenario.inputs_b;
  }
  r.chernoff = chernoff_analysis(r.normalized_threshold, r.normalized_value, counts, spec.p_target);

  const Behavior opt = born_behavior(spec.ideal);
  r.visibility = visibility_report(f, p, opt, Behavior::uniform(t.scenario));
  r.fidelity = measurement_fidelity_fit(f, spec.ideal, r.bell_value);
  return r;
}

}  // namespace hdbell
