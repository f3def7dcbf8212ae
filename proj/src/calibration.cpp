#include "orgsim/calibration.hpp"

#include "orgsim/config.hpp"
#include "orgsim/errors.hpp"
#include "orgsim/experiment.hpp"
#include "orgsim/rng.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numeric>
#include <set>
#include <thread>

namespace orgsim {

MetricMap to_metric_map(const Metrics& m) {
    MetricMap out;
    for (const auto& name : Metrics::all_names()) {
        out[name] = m.value(name);
    }
    return out;
}

double discrepancy(const MetricMap& metrics, const std::vector<Target>& targets) {
    double total_weight = 0.0;
    for (const auto& t : targets) {
        if (!(t.weight >= 0.0) || !std::isfinite(t.weight)) {
            throw BadWeights("weight of '" + t.metric + "' must be a finite value >= 0");
        }
        total_weight += t.weight;
    }
    if (!(total_weight > 0.0)) {
        throw BadWeights("target weights are all zero");
    }
    double acc = 0.0;
    for (const auto& t : targets) {
        const auto it = metrics.find(t.metric);
        if (it == metrics.end()) {
            throw MissingMetric("target metric '" + t.metric + "' is not produced by the model");
        }
        const double scale = std::max(std::abs(t.value), 1e-9);
        const double z = (it->second - t.value) / scale;
        acc += t.weight * z * z;
    }
    return std::sqrt(acc / total_weight);
}

namespace {

void check_space(const ParamSpace& space) {
    std::vector<SchemaIssue> issues;
    if (space.empty()) {
        issues.push_back({"parameters", "no parameters to calibrate"});
    }
    for (const auto& p : space) {
        if (!(std::isfinite(p.lo) && std::isfinite(p.hi) && p.lo <= p.hi)) {
            issues.push_back({p.name, "range needs lo <= hi"});
        }
    }
    if (!issues.empty()) {
        throw ConfigError(ConfigError::Kind::Schema, issues.front().path + ": " + issues.front().reason, issues);
    }
}

// One Latin-hypercube design: each dimension is cut into n strata, strata
// are permuted (Fisher-Yates) and a point is drawn uniformly inside each.
std::vector<std::vector<double>> latin_hypercube(const ParamSpace& space, std::size_t n, RandomStream& rng) {
    std::vector<std::vector<double>> points(n, std::vector<double>(space.size()));
    for (std::size_t d = 0; d < space.size(); ++d) {
        std::vector<std::size_t> strata(n);
        std::iota(strata.begin(), strata.end(), 0);
        for (std::size_t i = n; i > 1; --i) {
            const auto j = static_cast<std::size_t>(rng.uniform01() * static_cast<double>(i));
            std::swap(strata[i - 1], strata[std::min(j, i - 1)]);
        }
        const double width = space[d].hi - space[d].lo;
        for (std::size_t k = 0; k < n; ++k) {
            const double u = (static_cast<double>(strata[k]) + rng.uniform01()) / static_cast<double>(n);
            points[k][d] = std::clamp(space[d].lo + u * width, space[d].lo, space[d].hi);
        }
    }
    return points;
}

}  // namespace

CalibrationResult calibrate_search(const ParamSpace& space, const std::vector<Target>& targets,
                                   const Evaluator& evaluate, const CalibrationOptions& options) {
    if (options.budget < 1) {
        throw BadBudget("calibration budget must be at least 1");
    }
    check_space(space);

    const std::size_t budget = options.budget;
    const std::size_t n1 = std::clamp<std::size_t>(
        options.phase1_points.value_or(static_cast<std::size_t>(std::ceil(0.7 * static_cast<double>(budget)))), 1,
        budget);

    RngStreams streams(options.seed);
    const auto design = latin_hypercube(space, n1, streams.stream("calibration"));

    std::vector<CandidateResult> evaluated(n1);
    auto score = [&](const std::vector<double>& x) {
        CandidateResult c;
        c.params = x;
        c.metrics = evaluate(x);
        c.discrepancy = discrepancy(c.metrics, targets);
        return c;
    };

    // Phase 1 points are independent and may be evaluated concurrently.
    std::vector<std::exception_ptr> errors(n1);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < n1; i = next++) {
            try {
                evaluated[i] = score(design[i]);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    const unsigned threads = static_cast<unsigned>(std::min<std::size_t>(std::max(1u, options.threads), n1));
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned t = 0; t < threads; ++t) {
            pool.emplace_back(worker);
        }
    }
    for (const auto& e : errors) {
        if (e) {
            std::rethrow_exception(e);
        }
    }

    std::set<std::vector<double>> seen;
    std::size_t best = 0;
    for (std::size_t i = 0; i < n1; ++i) {
        seen.insert(evaluated[i].params);
        if (evaluated[i].discrepancy < evaluated[best].discrepancy) {
            best = i;
        }
    }

    // Phase 2: coordinate search from the best design point.
    std::vector<double> step(space.size());
    std::vector<double> min_step(space.size());
    for (std::size_t d = 0; d < space.size(); ++d) {
        const double width = space[d].hi - space[d].lo;
        step[d] = width / static_cast<double>(n1);
        min_step[d] = 1e-12 * width;
    }
    std::size_t used = n1;
    auto exhausted = [&] {
        for (std::size_t d = 0; d < step.size(); ++d) {
            if (step[d] > min_step[d] && step[d] > 0.0) {
                return false;
            }
        }
        return true;
    };
    while (used < budget && !exhausted()) {
        bool improved = false;
        for (std::size_t d = 0; d < space.size() && used < budget; ++d) {
            for (const double sign : {1.0, -1.0}) {
                if (used >= budget) {
                    break;
                }
                std::vector<double> x = evaluated[best].params;
                x[d] = std::clamp(x[d] + sign * step[d], space[d].lo, space[d].hi);
                if (!seen.insert(x).second) {
                    continue;
                }
                evaluated.push_back(score(x));
                ++used;
                if (evaluated.back().discrepancy < evaluated[best].discrepancy) {
                    best = evaluated.size() - 1;
                    improved = true;
                    break;
                }
            }
        }
        if (!improved) {
            for (auto& s : step) {
                s /= 2.0;
            }
        }
    }

    std::vector<std::size_t> order(evaluated.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return evaluated[a].discrepancy < evaluated[b].discrepancy;
    });
    CalibrationResult result;
    result.evaluations = used;
    for (std::size_t i : order) {
        if (result.ranked.size() >= std::max<std::size_t>(options.top_k, 1)) {
            break;
        }
        result.ranked.push_back(evaluated[i]);
    }
    return result;
}

Evaluator make_scenario_evaluator(const ScenarioConfig& base, const ParamSpace& space, std::size_t replications,
                                  std::uint64_t seed, unsigned threads) {
    const nlohmann::json doc = to_json(base);
    for (const auto& p : space) {
        get_config_value(doc, p.name);  // fail early on a bad path
    }
    return [doc, space, replications, seed, threads](const std::vector<double>& params) {
        nlohmann::json patched = doc;
        for (std::size_t d = 0; d < space.size(); ++d) {
            set_config_value(patched, space[d].name, params[d]);
        }
        const ScenarioConfig cfg = parse_scenario_json(patched);
        const ReplicationPlan plan{std::max<std::size_t>(replications, 1), seed, true, threads};
        const auto records = run_replications(cfg, plan);
        MetricMap mean;
        for (const auto& r : records) {
            for (const auto& [name, v] : to_metric_map(r.metrics)) {
                mean[name] += v;
            }
        }
        for (auto& [name, v] : mean) {
            v /= static_cast<double>(records.size());
        }
        return mean;
    };
}

}  // namespace orgsim
