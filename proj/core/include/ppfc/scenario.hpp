#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ppfc/controllability.hpp"
#include "ppfc/sim.hpp"

namespace ppfc {

using nlohmann::json;

// Scenario files are JSON objects with the sections
//   plant, controller, performance, fault, reference, initial, sim
// plus optional "name" and "base". Omitted fields come from the builtin named
// by "base", or from the default builtin for plant.type. Unknown keys are
// rejected with their dotted path.

std::vector<std::string> builtin_scenario_names();
std::vector<std::string> builtin_check_names();
bool is_builtin_scenario(const std::string& name);
bool is_builtin_check(const std::string& name);

json builtin_scenario_json(const std::string& name);
json builtin_check_json(const std::string& name);

/// Fills defaults and checks every key. The result has no "base" and
/// contains every field.
json resolve_scenario_json(const json& doc);

/// Resolves, builds and validates. Errors are ValidationError naming the key.
Scenario scenario_from_json(const json& doc);

/// Inverse of scenario_from_json for the built-in plant types.
json scenario_to_json(const Scenario& scenario);

/// Replaces the value at a dotted path ("initial.x.0", "performance.delta_lo")
/// in a resolved document. The path must already exist.
void apply_override(json& doc, const std::string& path, const json& value);

/// Parses "key=json;key2=json" into (path, value) pairs.
std::vector<std::pair<std::string, json>> parse_overrides(const std::string& text);

struct CheckSpec {
  std::string name;
  std::string description;
  ControllabilityProblem problem;
  AuxMatrixCandidate candidate;
  GridSpec grid;
  double margin = 1e-9;
};

/// Controllability check files: name, description, level, gain, rho, A, P,
/// grid, margin.
CheckSpec check_from_json(const json& doc);

json load_json_file(const std::string& path);

}  // namespace ppfc
