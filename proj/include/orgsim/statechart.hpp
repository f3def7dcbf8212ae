#pragma once

#include "orgsim/rng.hpp"

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace orgsim {

using SimTime = double;  // hours

namespace duration {
struct None {};
struct ConstantHours {
    double hours;
};
struct Sampled {
    Distribution distribution;
};
/// Length is decided by the hosting scenario when the state is entered.
struct ComputedAtEntry {};
}  // namespace duration

using DurationSpec =
    std::variant<duration::None, duration::ConstantHours, duration::Sampled, duration::ComputedAtEntry>;

bool has_duration(const DurationSpec& spec) noexcept;

struct StateDef {
    std::string id;
    int priority = 0;
    bool interruptible = true;
    DurationSpec duration = duration::None{};
};

enum class TriggerKind { Scheduled, Message, Timeout };

std::string_view to_string(TriggerKind kind) noexcept;

/// `signal` names the message kind or scheduled-event kind that fires the
/// trigger; it is empty for timeouts.
struct TriggerDef {
    TriggerKind kind = TriggerKind::Message;
    std::string signal;
    std::string from;
    std::string to;
    std::optional<std::string> guard;
};

struct StateChartDef {
    std::string name;
    std::vector<StateDef> states;
    std::string idle_id;
    std::vector<TriggerDef> triggers;

    const StateDef* find_state(std::string_view id) const noexcept;
    const StateDef& state(std::string_view id) const;  // throws InvalidTransition

    /// First trigger leaving `from` with the given kind and signal.
    const TriggerDef* find_trigger(std::string_view from, TriggerKind kind,
                                   std::string_view signal = {}) const noexcept;
};

enum class DefectKind {
    MissingIdle,
    UnreachableState,
    NoReturnToIdle,
    DuplicateId,
    DanglingReference,
    IdlePriority,
    MissingDuration,
};

std::string_view to_string(DefectKind kind) noexcept;

struct ChartDefect {
    DefectKind kind;
    std::string subject;  // offending state id, or "trigger[i]"
    std::string detail;
};

/// Empty result means every structural invariant holds.
std::vector<ChartDefect> validate_chart(const StateChartDef& chart);

struct Suspension {
    std::string state;
    double remaining = 0.0;

    bool operator==(const Suspension&) const = default;
};

struct StateChartInstance {
    std::shared_ptr<const StateChartDef> chart;
    std::string current;
    SimTime entered_at = 0.0;
    std::optional<Suspension> suspended;

    static StateChartInstance start(std::shared_ptr<const StateChartDef> chart, SimTime now = 0.0);
};

namespace fire {
struct Moved {
    std::string to;
};
struct Interrupted {
    std::string to;
    Suspension suspended;
};
struct Ignored {};
struct Deferred {};
}  // namespace fire

using FireOutcome = std::variant<fire::Moved, fire::Interrupted, fire::Ignored, fire::Deferred>;

/// Resolves a named guard. Guards are owned by the hosting scenario.
using GuardResolver = std::function<bool(std::string_view guard)>;

/// Applies `trigger` to `instance`.
///
/// - from == current: the current state completes, Moved.
/// - from is the idle state and current is something else: a preemption
///   request. Interrupted when current is interruptible, nothing is already
///   suspended and the target outranks current; otherwise Deferred.
/// - from is neither current nor idle: Deferred when `from` is the suspended
///   state (it applies after resumption), otherwise Ignored as stale.
///
/// The guard is consulted only when the trigger would take effect, and a
/// failing guard yields Ignored. `remaining_work` is what gets saved with the
/// current state if it is suspended.
FireOutcome fire_trigger(StateChartInstance& instance, const TriggerDef& trigger, SimTime now,
                         double remaining_work = 0.0, const GuardResolver& guards = {});

namespace resume {
struct Resumed {
    std::string state;
    double remaining;
};
struct NothingToResume {};
}  // namespace resume

using ResumeOutcome = std::variant<resume::Resumed, resume::NothingToResume>;

ResumeOutcome resume_suspended(StateChartInstance& instance, SimTime now);

}  // namespace orgsim
