#pragma once

#include "orgsim/agent.hpp"
#include "orgsim/design_dept.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace orgsim {

enum class ContractStatus { Queued, InProgress, Completed, Failed };

std::string_view to_string(ContractStatus s) noexcept;

struct ContractRecord {
    std::string id;
    SimTime arrival_time = 0.0;
    SimTime deadline = 0.0;
    double teamwork = 0.0;
    ContractStatus status = ContractStatus::Queued;
    std::optional<int> team;
    std::optional<SimTime> completed_at;
    std::vector<std::size_t> activities;  // indices into RunTrace::activities
};

struct ActivityRecord {
    std::size_t contract = 0;
    KnowledgeCategory category = KnowledgeCategory::Design;
    double effort = 0.0;
    double required_knowledge = 0.0;
    double remaining = 0.0;
    std::optional<AgentId> assignee;
    std::optional<SimTime> completed_at;
};

/// One uninterrupted stretch of a designer in Working at a frozen rate.
struct WorkSegment {
    std::size_t activity = 0;
    AgentId designer;
    SimTime start = 0.0;
    SimTime end = 0.0;
    double rate = 0.0;
};

struct DesignerRecord {
    AgentId id;
    std::string stereotype;
    Attributes initial;
    Attributes final;
};

struct AttributeSample {
    SimTime time = 0.0;
    AgentId agent;
    AttributeKey key = AttributeKey::Communication;
    double value = 0.0;
};

struct RunTrace {
    SimTime horizon = 0.0;
    std::vector<ContractRecord> contracts;
    std::vector<ActivityRecord> activities;
    std::vector<WorkSegment> segments;
    std::vector<SupportSession> support_sessions;
    std::vector<DesignerRecord> designers;
    std::vector<AttributeSample> samples;  // filled only when tracing
    double total_cost = 0.0;
};

struct Metrics {
    double contracts_arrived = 0.0;
    double contracts_completed = 0.0;
    double on_time_fraction = 0.0;
    double mean_tardiness_h = 0.0;
    double mean_team_productivity = 0.0;
    double total_cost = 0.0;
    double productivity_per_cost = 0.0;
    // Extra observables, available to calibration targets.
    double final_mean_communication = 0.0;
    double final_communication_spread = 0.0;

    /// Columns written to run_summary.csv, in order.
    static const std::vector<std::string>& summary_names();
    /// Every metric name, summary ones first.
    static const std::vector<std::string>& all_names();

    /// Throws MissingMetric for an unknown name.
    double value(std::string_view name) const;
    void set(std::string_view name, double v);
};

Metrics collect_metrics(const RunTrace& trace);

}  // namespace orgsim
