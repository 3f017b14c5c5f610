#pragma once

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "edgeflow/harness.hpp"
#include "edgeflow/reference.hpp"

namespace edgeflow {

inline constexpr int kScenarioVersion = 1;

// Parses a scenario document. Unknown keys are rejected.
// Throws ParseError (with line and column), SchemaError (with the key path),
// and ValidationFailed("consistency: ...") when the edge list is not a simple graph.
// No semantic validation beyond that; see validate_scenario.
Scenario parse_scenario(std::string_view text);

// parse_scenario on a file. Throws IoError.
Scenario read_scenario(const std::filesystem::path& path);

// read_scenario followed by require_valid.
Scenario load_scenario(const std::filesystem::path& path);

// Canonical document with every default written out; parse_scenario of its
// dump yields an identical Scenario.
nlohmann::json scenario_to_json(const Scenario& sc);

// SHA-256 (hex) of the canonical document.
std::string scenario_hash(const Scenario& sc);

// Objective types are looked up by name; new names can be registered before
// parsing. Parsers receive the "params" object (or null) and its key path.
using ObjectiveParser = std::function<ObjectiveSpec(const nlohmann::json& params, const std::string& path)>;
void register_objective_type(const std::string& name, ObjectiveParser parser);
nlohmann::json objective_to_json(const ObjectiveSpec& spec);

// Header t,x_1_1,...,x_m_n,lambda_1_1,...,lambda_m_n,V[,W]; 17 significant digits.
void write_trajectory_csv(std::ostream& os, const Trajectory& traj, int m, int n);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};
CsvTable read_csv(std::istream& is);

nlohmann::json summary_to_json(const RunSummary& summary, const std::string& scenario_hash);
nlohmann::json reference_to_json(const ReferenceSolution& ref);

std::string_view tool_version();

}  // namespace edgeflow
