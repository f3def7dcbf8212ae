#pragma once

#include "orgsim/agent.hpp"
#include "orgsim/rng.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace orgsim {

/// Every tunable constant of the design-department scenario. Defaults are
/// the documented ones; all are overridable from the config file.
struct ScenarioConstants {
    double eta_m = 0.05;       // communication drift rate, 1/h
    double eta_p = 0.05;       // productivity drift rate, 1/h
    double eta_k = 0.3;        // knowledge transfer per support session
    double kappa_meet = 4.0;   // communication drift multiplier in meetings
    Distribution support_duration = dist::Constant{2.0};  // d_s, h
    Distribution support_timeout = dist::Constant{1.0};   // T_w, h
    double meeting_interval = 40.0;                       // W, h
    Distribution meeting_duration = dist::Constant{1.0};  // d_meet, h
    double g_supported = 0.9;
    double g_unsupported = 0.5;
    double cost_base = 10.0;   // a, money per agent-hour
    double cost_skill = 20.0;  // b, money per agent-hour per unit skill
    double default_teamwork = 0.5;
    double meeting_attendance = 1.0;  // probability an agent joins a meeting
    double attribute_step = 1.0;      // upper bound on the attribute update step, h
    double trace_interval = 10.0;     // attribute sampling period, h
};

/// A designer entry: a named stereotype, optional per-field overrides and a
/// repeat count.
struct DesignerSlot {
    std::string stereotype;
    Stereotype overrides;  // only the fields that are set apply
    int count = 1;
};

struct TeamConfig {
    std::string supervisor_stereotype;
    std::vector<DesignerSlot> designers;
};

struct DepartmentConfig {
    std::map<std::string, Stereotype> stereotypes;
    std::string manager_stereotype;
    std::vector<TeamConfig> teams;
};

struct ActivitySpec {
    KnowledgeCategory category = KnowledgeCategory::Design;
    double effort = 1.0;              // E, person-hours
    double required_knowledge = 0.0;  // theta
};

struct ContractSpec {
    std::string id;
    double arrival_time = 0.0;
    double deadline = 0.0;
    std::optional<double> teamwork;  // tau; falls back to default_teamwork
    std::vector<ActivitySpec> activities;
};

struct ActivityTemplate {
    double weight = 1.0;
    KnowledgeCategory category = KnowledgeCategory::Design;
    Distribution effort = dist::Constant{8.0};
    Distribution required_knowledge = dist::Constant{0.5};
};

/// Poisson contract arrivals; each contract draws `activities_per_contract`
/// activities from the weighted templates.
struct ArrivalProcess {
    double rate = 0.0;  // lambda_arr, contracts per hour
    double start = 0.0;
    Distribution deadline_offset = dist::Constant{100.0};
    std::optional<double> teamwork;
    int activities_per_contract = 1;
    std::vector<ActivityTemplate> templates;
};

struct ContractsConfig {
    std::vector<ContractSpec> explicit_contracts;
    std::optional<ArrivalProcess> arrivals;
};

struct ScenarioConfig {
    double horizon = 1000.0;
    ScenarioConstants constants;
    DepartmentConfig department;
    ContractsConfig contracts;
};

/// Base stereotype with the slot's overrides applied.
Stereotype resolve_stereotype(const DepartmentConfig& dept, const DesignerSlot& slot);

}  // namespace orgsim
