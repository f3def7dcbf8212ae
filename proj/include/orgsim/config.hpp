#pragma once

#include "orgsim/scenario_config.hpp"

#include <json.hpp>

#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace orgsim {

// Scenario file format (JSON). Every section except "department" is
// optional; omitted constants take their defaults.
//
// {
//   "horizon": 1000,
//   "constants": { "eta_m": 0.05, "support_duration": 2, ... },
//   "department": {
//     "stereotypes": {
//       "senior": { "knowledge": {"planning": 0.9, "design": 0.9, "testing": 0.9},
//                   "communication": 0.1, "productivity": 0.8,
//                   "willingness_to_support": 0.7, "willingness_to_communicate": 0.5,
//                   "base_productivity": 0.8 } },
//     "manager": "senior",
//     "teams": [ { "supervisor": "senior",
//                  "designers": ["senior", {"stereotype": "senior", "count": 2,
//                                           "overrides": {"communication": 0.9}}] } ]
//   },
//   "contracts": {
//     "explicit": [ { "id": "c1", "arrival_time": 0, "deadline": 80, "teamwork": 0.5,
//                     "activities": [ {"category": "design", "effort": 8, "required_knowledge": 0.5} ] } ],
//     "arrivals": { "rate": 0.05, "start": 0, "deadline_offset": 120, "teamwork": 0.5,
//                   "activities_per_contract": 2,
//                   "templates": [ {"weight": 1, "category": "design", "effort": 8, "required_knowledge": 0.5} ] }
//   }
// }
//
// A level or duration is either a number or a distribution object:
//   {"dist": "constant", "value": v}   {"dist": "uniform", "a": a, "b": b}
//   {"dist": "exponential", "mean": m} {"dist": "triangular", "a": a, "mode": m, "b": b}
//   {"dist": "bernoulli", "p": p}
// "knowledge" may also be a single value applied to all three categories.

/// Throws ConfigError(Schema) listing every defect.
ScenarioConfig parse_scenario_json(const nlohmann::json& doc);

/// Throws ConfigError(Syntax) with the line number, or ConfigError(Schema).
ScenarioConfig parse_scenario_text(std::string_view text);

/// Throws ConfigError(FileNotFound), then as parse_scenario_text.
ScenarioConfig parse_scenario_config(const std::filesystem::path& path);

/// Normalised form: every constant present, distributions in canonical
/// shape, designer entries as objects.
nlohmann::json to_json(const ScenarioConfig& config);

nlohmann::json distribution_to_json(const Distribution& d);

/// Dotted path into a document, e.g. "constants.eta_m" or
/// "department.teams.0.designers.1.count". The path must already exist and
/// hold a number; otherwise ConfigError(Schema).
void set_config_value(nlohmann::json& doc, std::string_view path, double value);
double get_config_value(const nlohmann::json& doc, std::string_view path);

/// Applies numeric overrides by path and re-validates.
ScenarioConfig with_overrides(const ScenarioConfig& config,
                              const std::vector<std::pair<std::string, double>>& overrides);

/// Reads a whole JSON file. Throws ConfigError(FileNotFound or Syntax).
nlohmann::json read_json_file(const std::filesystem::path& path);

}  // namespace orgsim
