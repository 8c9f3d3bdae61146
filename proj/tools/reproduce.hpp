#pragma once

// Reproduction driver: recomputes every published number and compares it to
// the quoted value with a fixed tolerance. Shared by `hdbell reproduce` and the
// acceptance test binary.

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "hdbell/convex.hpp"
#include "hdbell/json_io.hpp"

namespace hdbell::repro {

struct Options {
  /// Skips the dimension-bound rows and Table I (the slow parts).
  bool quick = false;
  std::uint64_t seed = 0;
  int threads = 1;
  SolverTolerances tol{};
  int seesaw_restarts = 50;
  /// Table I needs many restarts at D = 2 to escape local optima.
  int table1_restarts = 300;
  int mc_trials = 10000;
  /// Directory holding table4.csv and table5.csv.
  std::string data_dir;
  /// Receives one line per finished step.
  std::function<void(const std::string&)> progress;
};

struct Row {
  std::string id;
  int criterion = 0;
  std::string description;
  double value = 0.0;
  double expected = 0.0;
  /// Pass when |value - expected| <= tolerance.
  double tolerance = 0.0;
  bool pass = false;
  /// Rows that are reported but never fail the run.
  bool must_pass = true;
  std::string note;
  double runtime_seconds = 0.0;
  std::map<std::string, double> residuals;
};

struct Manifest {
  Options options;
  std::vector<Row> rows;
  double runtime_seconds = 0.0;

  /// Every must-pass row passed.
  bool passed() const;
  bool criterion_passed(int criterion) const;
};

/// Errors from data loading (ParseError, IncompleteTable) propagate.
Manifest run(const Options& opt);

Json to_json(const Manifest& m);

/// Human-readable title of each acceptance criterion (1 to 11).
std::string criterion_title(int criterion);

}  // namespace hdbell::repro
