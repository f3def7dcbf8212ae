#include "orgsim/experiment.hpp"

#include "orgsim/errors.hpp"
#include "orgsim/rng.hpp"

#include <boost/math/distributions/students_t.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <optional>
#include <thread>

namespace orgsim {

std::uint64_t plan_seed(const ReplicationPlan& plan, std::size_t index, std::string_view tag) {
    return tag.empty() ? replication_seed(plan.base_seed, index) : replication_seed(plan.base_seed, index, tag);
}

std::vector<ReplicationRecord> run_replications(const ReplicationFn& fn, const ReplicationPlan& plan,
                                                std::string_view tag) {
    if (plan.n == 0) {
        throw InsufficientSamples("replication plan needs n >= 1");
    }
    std::vector<ReplicationRecord> records(plan.n);
    std::vector<std::exception_ptr> errors(plan.n);
    std::atomic<std::size_t> next{0};

    auto worker = [&] {
        for (std::size_t i = next++; i < plan.n; i = next++) {
            const std::uint64_t seed = plan_seed(plan, i, tag);
            try {
                records[i] = ReplicationRecord{i, seed, fn(i, seed)};
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };

    unsigned threads = plan.threads != 0 ? plan.threads : std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, plan.n));
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned t = 0; t < threads; ++t) {
            pool.emplace_back(worker);
        }
    }

    for (std::size_t i = 0; i < plan.n; ++i) {
        if (errors[i]) {
            try {
                std::rethrow_exception(errors[i]);
            } catch (const std::exception& e) {
                throw ReplicationError(i, e.what());
            }
        }
    }
    return records;
}

std::vector<ReplicationRecord> run_replications(const ScenarioConfig& config, const ReplicationPlan& plan,
                                                std::string_view tag) {
    return run_replications([&](std::size_t, std::uint64_t seed) { return simulate(config, seed).metrics; }, plan,
                            tag);
}

double student_t_quantile(double p, double dof) {
    const boost::math::students_t dist(dof);
    return boost::math::quantile(dist, p);
}

SummaryStats summarize(std::span<const double> samples, double alpha) {
    if (samples.empty()) {
        throw InsufficientSamples("summary needs at least one sample");
    }
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw Error("alpha must lie in (0, 1)");
    }
    SummaryStats s;
    s.n = samples.size();
    s.alpha = alpha;
    double sum = 0.0;
    for (double x : samples) {
        sum += x;
    }
    s.mean = sum / static_cast<double>(s.n);
    if (s.n == 1) {
        s.degenerate = true;
        s.ci_low = s.ci_high = s.mean;
        return s;
    }
    double ss = 0.0;
    for (double x : samples) {
        ss += (x - s.mean) * (x - s.mean);
    }
    s.sd = std::sqrt(ss / static_cast<double>(s.n - 1));
    const double t = student_t_quantile(1.0 - alpha / 2.0, static_cast<double>(s.n - 1));
    const double half = t * s.sd / std::sqrt(static_cast<double>(s.n));
    s.ci_low = s.mean - half;
    s.ci_high = s.mean + half;
    return s;
}

std::vector<MetricSummary> summarize_records(const std::vector<ReplicationRecord>& records,
                                             const std::vector<std::string>& metrics, double alpha) {
    std::vector<MetricSummary> out;
    for (const auto& name : metrics) {
        std::vector<double> xs;
        xs.reserve(records.size());
        for (const auto& r : records) {
            xs.push_back(r.metrics.value(name));
        }
        out.push_back({name, summarize(xs, alpha)});
    }
    return out;
}

std::vector<MetricSummary> paired_differences(const std::vector<ReplicationRecord>& a,
                                              const std::vector<ReplicationRecord>& b,
                                              const std::vector<std::string>& metrics, double alpha) {
    if (a.size() != b.size()) {
        throw Error("paired comparison needs equally many replications on both sides");
    }
    std::vector<MetricSummary> out;
    for (const auto& name : metrics) {
        std::vector<double> diffs;
        diffs.reserve(a.size());
        for (std::size_t i = 0; i < a.size(); ++i) {
            diffs.push_back(b[i].metrics.value(name) - a[i].metrics.value(name));
        }
        out.push_back({name, summarize(diffs, alpha)});
    }
    return out;
}

PairedComparison compare_paired(const ScenarioConfig& config_a, const ScenarioConfig& config_b,
                                const ReplicationPlan& plan, double alpha) {
    PairedComparison cmp;
    cmp.a = run_replications(config_a, plan);
    cmp.b = run_replications(config_b, plan, plan.paired ? std::string_view{} : std::string_view{"B"});
    cmp.differences = paired_differences(cmp.a, cmp.b, Metrics::all_names(), alpha);
    return cmp;
}

}  // namespace orgsim
