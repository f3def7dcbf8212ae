#pragma once

#include "orgsim/calibration.hpp"

#include <json.hpp>

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace orgsim {

/// Exit codes of execute_command.
inline constexpr int kExitOk = 0;
inline constexpr int kExitDomainError = 1;
inline constexpr int kExitUsage = 2;

/// `args` excludes the program name, e.g. {"run", "--config", "s.json"}.
/// Data goes to files; diagnostics and usage text go to `err`, help to `out`.
int execute_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Calibration request file:
///   { "parameters": { "constants.eta_m": [0, 0.5] },
///     "targets": { "final_mean_communication": 0.31,
///                  "final_communication_spread": {"value": 0.12, "weight": 2} },
///     "replications_per_eval": 3, "budget": 500, "top_k": 5 }
struct CalibrationSpec {
    ParamSpace space;
    std::vector<Target> targets;
    std::size_t replications_per_eval = 3;
    std::optional<std::size_t> budget;
    std::size_t top_k = 5;
};

/// Throws ConfigError(Schema).
CalibrationSpec parse_calibration_spec(const nlohmann::json& doc);

/// Sweep request file: { "parameters": { "constants.eta_m": [0.0, 0.1, 0.2] } }.
/// Several parameters span their full grid. Parameters are ordered by name,
/// the first varying slowest.
struct SweepSpec {
    std::vector<std::string> parameters;
    std::vector<std::vector<double>> values;
};

/// Throws ConfigError(Schema).
SweepSpec parse_sweep_spec(const nlohmann::json& doc);

std::vector<std::vector<double>> sweep_grid(const SweepSpec& spec);

}  // namespace orgsim
