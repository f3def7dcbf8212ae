#pragma once

#include "orgsim/calibration.hpp"
#include "orgsim/experiment.hpp"
#include "orgsim/metrics.hpp"

#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace orgsim {

// CSV conventions: comma separated, '.' decimal point, header row, reals in
// 6-decimal fixed notation.

std::string format_real(double v);

/// replication, seed, then the summary metrics.
std::string run_summary_csv(const std::vector<ReplicationRecord>& records);

/// metric, n, mean, sd, ci_low, ci_high, alpha.
std::string run_stats_csv(const std::vector<MetricSummary>& stats);

/// Long format: time, agent_id, attribute, value.
std::string agent_trace_csv(const RunTrace& trace);

/// One tab-separated line per processed event.
std::string events_log_text(const RunInfo& info);

/// metric, n, mean_a, mean_b, mean_diff, sd_diff, ci_low, ci_high, alpha.
std::string compare_summary_csv(const PairedComparison& cmp);

struct SweepPoint {
    std::vector<double> values;  // aligned with the sweep's parameter names
    std::vector<MetricSummary> stats;
};

/// point, one column per parameter, metric, n, mean, sd, ci_low, ci_high, alpha.
std::string sweep_summary_csv(const std::vector<std::string>& parameters, const std::vector<SweepPoint>& points);

/// rank, discrepancy, one column per parameter, then one per metric.
std::string calibration_report_csv(const ParamSpace& space, const std::vector<CandidateResult>& ranked);

/// Writes through a temporary file in the same directory and renames it
/// into place. Throws IoError naming the path.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

}  // namespace orgsim
