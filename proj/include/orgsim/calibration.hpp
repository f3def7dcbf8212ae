#pragma once

#include "orgsim/metrics.hpp"
#include "orgsim/scenario_config.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace orgsim {

/// A calibrated input: a numeric config path and its inclusive range.
struct ParamRange {
    std::string name;
    double lo = 0.0;
    double hi = 0.0;
};

using ParamSpace = std::vector<ParamRange>;

struct Target {
    std::string metric;
    double value = 0.0;
    double weight = 1.0;
};

using MetricMap = std::map<std::string, double, std::less<>>;

MetricMap to_metric_map(const Metrics& m);

/// sqrt(sum_j w_j ((m_j - t_j) / s_j)^2 / sum_j w_j), s_j = max(|t_j|, 1e-9).
/// Throws MissingMetric for a target absent from `metrics` and BadWeights
/// for a negative weight or an all-zero weight vector.
double discrepancy(const MetricMap& metrics, const std::vector<Target>& targets);

struct CandidateResult {
    std::vector<double> params;  // aligned with the ParamSpace
    double discrepancy = 0.0;
    MetricMap metrics;
};

using Evaluator = std::function<MetricMap(const std::vector<double>& params)>;

struct CalibrationOptions {
    std::size_t budget = 100;
    std::uint64_t seed = 1;
    std::size_t top_k = 5;
    /// Latin-hypercube size. Defaults to ceil(0.7 * budget); holding it fixed
    /// while growing the budget only appends refinement steps.
    std::optional<std::size_t> phase1_points;
    unsigned threads = 1;
};

struct CalibrationResult {
    std::vector<CandidateResult> ranked;  // best first, at most top_k, distinct assignments
    std::size_t evaluations = 0;
};

/// Latin-hypercube sampling followed by coordinate-wise refinement around
/// the best point, halving the step after a sweep without improvement.
/// Throws BadBudget for budget 0 and ConfigError for an empty or inverted
/// range.
CalibrationResult calibrate_search(const ParamSpace& space, const std::vector<Target>& targets,
                                   const Evaluator& evaluate, const CalibrationOptions& options);

/// Averages metrics over `replications` paired replications (seeds
/// replication_seed(seed, i)) of `base` with the parameters written to their
/// config paths.
Evaluator make_scenario_evaluator(const ScenarioConfig& base, const ParamSpace& space, std::size_t replications,
                                  std::uint64_t seed, unsigned threads = 1);

}  // namespace orgsim
