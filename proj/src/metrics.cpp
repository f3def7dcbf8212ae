#include "orgsim/metrics.hpp"

#include "orgsim/errors.hpp"

#include <cmath>

namespace orgsim {

std::string_view to_string(ContractStatus s) noexcept {
    switch (s) {
        case ContractStatus::Queued: return "queued";
        case ContractStatus::InProgress: return "in_progress";
        case ContractStatus::Completed: return "completed";
        case ContractStatus::Failed: return "failed";
    }
    return "?";
}

namespace {

struct Field {
    std::string_view name;
    double Metrics::*member;
};

constexpr Field kFields[] = {
    {"contracts_arrived", &Metrics::contracts_arrived},
    {"contracts_completed", &Metrics::contracts_completed},
    {"on_time_fraction", &Metrics::on_time_fraction},
    {"mean_tardiness_h", &Metrics::mean_tardiness_h},
    {"mean_team_productivity", &Metrics::mean_team_productivity},
    {"total_cost", &Metrics::total_cost},
    {"productivity_per_cost", &Metrics::productivity_per_cost},
    {"final_mean_communication", &Metrics::final_mean_communication},
    {"final_communication_spread", &Metrics::final_communication_spread},
};

constexpr std::size_t kSummaryFieldCount = 7;

}  // namespace

const std::vector<std::string>& Metrics::summary_names() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> v;
        for (std::size_t i = 0; i < kSummaryFieldCount; ++i) {
            v.emplace_back(kFields[i].name);
        }
        return v;
    }();
    return names;
}

const std::vector<std::string>& Metrics::all_names() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> v;
        for (const auto& f : kFields) {
            v.emplace_back(f.name);
        }
        return v;
    }();
    return names;
}

double Metrics::value(std::string_view name) const {
    for (const auto& f : kFields) {
        if (f.name == name) {
            return this->*f.member;
        }
    }
    throw MissingMetric("unknown metric '" + std::string(name) + "'");
}

void Metrics::set(std::string_view name, double v) {
    for (const auto& f : kFields) {
        if (f.name == name) {
            this->*f.member = v;
            return;
        }
    }
    throw MissingMetric("unknown metric '" + std::string(name) + "'");
}

Metrics collect_metrics(const RunTrace& trace) {
    Metrics m;
    m.contracts_arrived = static_cast<double>(trace.contracts.size());

    std::size_t on_time = 0;
    std::size_t late = 0;
    double tardiness = 0.0;
    for (const auto& c : trace.contracts) {
        if (c.status != ContractStatus::Completed || !c.completed_at) {
            continue;
        }
        m.contracts_completed += 1.0;
        if (*c.completed_at <= c.deadline) {
            ++on_time;
        } else {
            ++late;
            tardiness += *c.completed_at - c.deadline;
        }
    }
    if (!trace.contracts.empty()) {
        m.on_time_fraction = static_cast<double>(on_time) / m.contracts_arrived;
    }
    if (late > 0) {
        m.mean_tardiness_h = tardiness / static_cast<double>(late);
    }

    const double n_designers = static_cast<double>(trace.designers.size());
    if (trace.horizon > 0.0 && n_designers > 0.0) {
        double work = 0.0;
        for (const auto& s : trace.segments) {
            work += s.rate * (s.end - s.start);
        }
        m.mean_team_productivity = work / (trace.horizon * n_designers);
    }

    m.total_cost = trace.total_cost;
    double completed_effort = 0.0;
    for (const auto& a : trace.activities) {
        if (a.completed_at) {
            completed_effort += a.effort;
        }
    }
    if (m.total_cost > 0.0) {
        m.productivity_per_cost = completed_effort / m.total_cost;
    }

    if (n_designers > 0.0) {
        double sum = 0.0;
        for (const auto& d : trace.designers) {
            sum += d.final.communication;
        }
        const double mean = sum / n_designers;
        double ss = 0.0;
        for (const auto& d : trace.designers) {
            ss += (d.final.communication - mean) * (d.final.communication - mean);
        }
        m.final_mean_communication = mean;
        m.final_communication_spread = std::sqrt(ss / n_designers);
    }
    return m;
}

}  // namespace orgsim
