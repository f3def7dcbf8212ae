#pragma once

#include "orgsim/department_model.hpp"
#include "orgsim/metrics.hpp"
#include "orgsim/scenario_config.hpp"

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace orgsim {

struct ReplicationPlan {
    std::size_t n = 1;
    std::uint64_t base_seed = 1;
    bool paired = true;        // B shares A's seeds; otherwise B uses the "B" tag
    unsigned threads = 0;      // 0: hardware concurrency
};

struct ReplicationRecord {
    std::size_t index = 0;
    std::uint64_t seed = 0;
    Metrics metrics;
};

/// Seed of replication i: replication_seed(base, i), or the tagged variant
/// when `tag` is non-empty.
std::uint64_t plan_seed(const ReplicationPlan& plan, std::size_t index, std::string_view tag = {});

using ReplicationFn = std::function<Metrics(std::size_t index, std::uint64_t seed)>;

/// Runs `fn` for every index of the plan, possibly concurrently, and returns
/// the records ordered by index. A failure is rethrown as ReplicationError
/// naming the lowest failing index.
std::vector<ReplicationRecord> run_replications(const ReplicationFn& fn, const ReplicationPlan& plan,
                                                std::string_view tag = {});

std::vector<ReplicationRecord> run_replications(const ScenarioConfig& config, const ReplicationPlan& plan,
                                                std::string_view tag = {});

struct SummaryStats {
    std::size_t n = 0;
    double mean = 0.0;
    double sd = 0.0;  // n - 1 divisor
    double ci_low = 0.0;
    double ci_high = 0.0;
    double alpha = 0.05;
    bool degenerate = false;  // n == 1: the interval collapses to the mean
};

/// Quantile of Student's t with `dof` degrees of freedom (Boost.Math).
double student_t_quantile(double p, double dof);

/// mean +- t_{n-1, 1-alpha/2} * sd / sqrt(n). Throws InsufficientSamples
/// for an empty sample.
SummaryStats summarize(std::span<const double> samples, double alpha = 0.05);

struct MetricSummary {
    std::string metric;
    SummaryStats stats;
};

std::vector<MetricSummary> summarize_records(const std::vector<ReplicationRecord>& records,
                                             const std::vector<std::string>& metrics, double alpha = 0.05);

struct PairedComparison {
    std::vector<ReplicationRecord> a;
    std::vector<ReplicationRecord> b;
    std::vector<MetricSummary> differences;  // B - A, replication-wise
};

PairedComparison compare_paired(const ScenarioConfig& config_a, const ScenarioConfig& config_b,
                                const ReplicationPlan& plan, double alpha = 0.05);

/// Per-metric B - A differences of two record sets of equal length.
std::vector<MetricSummary> paired_differences(const std::vector<ReplicationRecord>& a,
                                              const std::vector<ReplicationRecord>& b,
                                              const std::vector<std::string>& metrics, double alpha = 0.05);

}  // namespace orgsim
