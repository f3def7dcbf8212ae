#pragma once

#include "orgsim/agent.hpp"
#include "orgsim/scenario_config.hpp"
#include "orgsim/statechart.hpp"

#include <memory>
#include <optional>
#include <span>
#include <variant>

namespace orgsim {

// State and message names used by the design-department charts.
namespace states {
inline constexpr std::string_view kIdle = "Idle";
inline constexpr std::string_view kWorking = "Working";
inline constexpr std::string_view kSeekingSupport = "SeekingSupport";
inline constexpr std::string_view kProvidingSupport = "ProvidingSupport";
inline constexpr std::string_view kInMeeting = "InMeeting";
inline constexpr std::string_view kAllocating = "Allocating";
}  // namespace states

namespace messages {
inline constexpr std::string_view kContractAssigned = "ContractAssigned";
inline constexpr std::string_view kTaskAssigned = "TaskAssigned";
inline constexpr std::string_view kSupportRequest = "SupportRequest";
inline constexpr std::string_view kSupportAccepted = "SupportAccepted";
inline constexpr std::string_view kSupportResolved = "SupportResolved";
inline constexpr std::string_view kSupportUnavailable = "SupportUnavailable";
inline constexpr std::string_view kSupportEnded = "SupportEnded";
inline constexpr std::string_view kActivityCompleted = "ActivityCompleted";
inline constexpr std::string_view kAvailable = "Available";
}  // namespace messages

namespace signals {
inline constexpr std::string_view kMeeting = "meeting";
inline constexpr std::string_view kContractArrival = "contract_arrival";
}  // namespace signals

namespace guards {
inline constexpr std::string_view kHasKnowledge = "has_knowledge";
inline constexpr std::string_view kLacksKnowledge = "lacks_knowledge";
inline constexpr std::string_view kAttendsMeeting = "attends_meeting";
}  // namespace guards

/// Designer chart, reconstructed from the scenario's prose:
///   Idle(p0), SeekingSupport(p1, interruptible, T_w),
///   Working(p1, interruptible, remaining / rate), ProvidingSupport(p2, d_s),
///   InMeeting(p3, d_meet). Meetings preempt from Idle via a scheduled trigger.
std::shared_ptr<const StateChartDef> make_designer_chart(const ScenarioConstants& constants);

/// Manager and supervisor chart: Idle(p0), Allocating(p1, 0 h), InMeeting(p3).
std::shared_ptr<const StateChartDef> make_coordinator_chart(const ScenarioConstants& constants,
                                                            std::string name);

/// Index of the trigger from -> to with the given kind and signal. Throws
/// InvalidTransition when the chart has no such trigger.
std::size_t trigger_index(const StateChartDef& chart, std::string_view from, std::string_view to, TriggerKind kind,
                          std::string_view signal = {});

// Message payloads. TaskAssigned, SupportRequest, SupportResolved and
// SupportUnavailable carry subject = activity, related = category index,
// value = required knowledge. SupportAccepted carries subject = session.
// SupportEnded carries related = category index, value = supporter level.

/// Designer reactions: task intake (work directly or seek support), support
/// replies, state timeouts, meetings and knowledge transfer at session end.
RuleTable designer_rules(std::shared_ptr<const StateChartDef> chart, AgentId supervisor, double eta_k);

/// Least total remaining effort wins; ties go to the lowest team index.
std::size_t assign_contract_to_team(std::span<const double> team_loads);

struct RateInputs {
    double productivity = 0.0;
    double knowledge = 0.0;           // designer's level in the activity's category
    double required_knowledge = 0.0;  // theta
    double teamwork = 0.0;            // tau
    double team_mean_communication = 0.0;
    bool supported = false;  // an accepted support session is active
};

/// r = p * g * ((1 - tau) + tau * mean_m), with g = 1 when the designer
/// has the knowledge, g_supported under support, g_unsupported otherwise.
double effective_rate(const RateInputs& in, const ScenarioConstants& constants);

struct AllocationCandidate {
    AgentId designer;
    double rate = 0.0;
};

/// Picks the idle candidate with the highest rate (ties: lowest index);
/// nullopt when nobody is idle and the activity should queue.
std::optional<AgentId> allocate_activity(std::span<const AllocationCandidate> idle_candidates);

struct SupportCandidate {
    AgentId designer;
    double knowledge = 0.0;  // level in the requested category
    bool idle = false;
    double willingness_to_support = 0.0;
};

struct SupportSession {
    AgentId requester;
    AgentId supporter;
    std::int64_t activity = -1;
    SimTime starts = 0.0;
    double duration = 0.0;
    double supporter_knowledge = 0.0;  // at acceptance
    double required_knowledge = 0.0;
};

namespace support {
struct Accepted {
    SupportSession session;
};
struct Unsupported {
    enum class Reason { NoQualifiedColleague, NobodyAvailable } reason;
};
}  // namespace support

using SupportOutcome = std::variant<support::Accepted, support::Unsupported>;

struct SupportRequest {
    AgentId requester;
    std::int64_t activity = -1;
    double required_knowledge = 0.0;
    SimTime now = 0.0;
};

/// Walks qualified teammates (knowledge >= theta) in descending knowledge,
/// lowest index first on ties. Each idle one accepts with probability equal
/// to its willingness, drawn from "decisions:<candidate>". The session
/// length is drawn from "durations:<supporter>".
SupportOutcome request_support(const SupportRequest& request, std::span<const SupportCandidate> team,
                               const Distribution& session_duration, RngStreams& streams);

/// max(0, remaining - rate * elapsed).
double apply_work_progress(double remaining, double rate, double elapsed);

struct MemberContext {
    bool in_meeting = false;
    std::optional<KnowledgeCategory> working_on;  // set while in Working
};

/// One explicit step of the attribute dynamics for a team's designers,
/// using pre-step values for every neighbour term:
///   m_i += eta_m * w_i * (mean_{j != i} m_j - m_i) * dt_eff
///   p_i += eta_p * (p*_i - p_i) * dt
/// with dt_eff = kappa_meet * dt in meetings and p*_i = (k_active + m_i) / 2
/// while working, base productivity otherwise. Levels are clamped.
void evolve_attributes(std::span<Attributes> team, std::span<const Traits> traits,
                       std::span<const MemberContext> context, double dt, const ScenarioConstants& constants);

/// Knowledge transfer at the end of a support session.
double transferred_knowledge(double requester_level, double supporter_level, double eta_k);

/// sum_i (a + b * skill_i) * dt over agents' start-of-run mean skill.
double accrue_cost(std::span<const double> start_skill_means, double dt, double cost_base, double cost_skill);

}  // namespace orgsim
