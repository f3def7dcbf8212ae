#pragma once

#include "orgsim/engine.hpp"
#include "orgsim/metrics.hpp"
#include "orgsim/scenario_config.hpp"

#include <cstdint>
#include <functional>

namespace orgsim {

// Same-time ordering of scenario events, highest first.
namespace event_priority {
inline constexpr int kTimeout = 30;
inline constexpr int kMeeting = 20;
inline constexpr int kArrival = 15;
inline constexpr int kMessage = 10;
inline constexpr int kSample = 1;
inline constexpr int kTick = 0;
}  // namespace event_priority

struct ContractCounts {
    std::size_t arrived = 0;
    std::size_t queued = 0;
    std::size_t in_progress = 0;
    std::size_t completed = 0;
    std::size_t failed = 0;
};

struct SimulationOptions {
    bool record_event_log = false;
    bool record_trace = false;
    std::function<void(const Event&, const ContractCounts&)> observer;
    DiagnosticSink diagnostics;
};

struct RunResult {
    RunTrace trace;
    Metrics metrics;
    RunInfo info;
};

/// Builds the department from `config`, runs it to the horizon under
/// `seed` and collects metrics. The result is a pure function of
/// (config, seed).
RunResult simulate(const ScenarioConfig& config, std::uint64_t seed, const SimulationOptions& options = {});

}  // namespace orgsim
