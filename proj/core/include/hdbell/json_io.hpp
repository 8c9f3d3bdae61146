#pragma once

// JSON documents for scenarios, states, behaviors, functionals, witnesses and
// solver reports. Every document carries a "kind" field; readers reject
// documents of the wrong kind with ParseError. Numbers are written with full
// double precision.

#include <string>

#include <nlohmann/json.hpp>

#include "hdbell/binarise.hpp"
#include "hdbell/dim_bound.hpp"
#include "hdbell/stats.hpp"

namespace hdbell {

using Json = nlohmann::json;

Json to_json(const Scenario& s);
Scenario scenario_from_json(const Json& j);

Json to_json(const StateSpec& s);
StateSpec state_spec_from_json(const Json& j);

/// {"kind": "behavior", "scenario", "values"}; values indexed like Behavior.
Json to_json(const Behavior& p);
Behavior behavior_from_json(const Json& j);

/// {"kind": "functional", "name", "layout", "scenario", "coeffs", "offset"}.
Json to_json(const BellFunctional& f);
BellFunctional functional_from_json(const Json& j);

/// Functional document with kind "witness" plus the LP diagnostics. Reading
/// returns the functional only.
Json witness_to_json(const WitnessReport& w);
BellFunctional witness_from_json(const Json& j);

Json to_json(const LhvBound& b, const Scenario& s);

/// Best value, trajectory lengths and a model digest (state eigenvalues and
/// the Gram matrices Tr(A_a A_a') of every measurement).
Json to_json(const SeesawResult& r);

/// Per-profile bounds, winning profile, span dimensions and residuals.
Json to_json(const DimBoundReport& r);

Json to_json(const ChernoffResult& c);
Json to_json(const StatsReport& r);

/// Errors: ParseError for unreadable files or malformed JSON.
Json load_json_file(const std::string& path);
void save_json_file(const std::string& path, const Json& j);

}  // namespace hdbell
