#include "orgsim/statechart.hpp"

#include "orgsim/errors.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <set>

namespace orgsim {

bool has_duration(const DurationSpec& spec) noexcept {
    return !std::holds_alternative<duration::None>(spec);
}

std::string_view to_string(TriggerKind kind) noexcept {
    switch (kind) {
        case TriggerKind::Scheduled: return "scheduled";
        case TriggerKind::Message: return "message";
        case TriggerKind::Timeout: return "timeout";
    }
    return "?";
}

std::string_view to_string(DefectKind kind) noexcept {
    switch (kind) {
        case DefectKind::MissingIdle: return "MissingIdle";
        case DefectKind::UnreachableState: return "UnreachableState";
        case DefectKind::NoReturnToIdle: return "NoReturnToIdle";
        case DefectKind::DuplicateId: return "DuplicateId";
        case DefectKind::DanglingReference: return "DanglingReference";
        case DefectKind::IdlePriority: return "IdlePriority";
        case DefectKind::MissingDuration: return "MissingDuration";
    }
    return "?";
}

const StateDef* StateChartDef::find_state(std::string_view id) const noexcept {
    auto it = std::find_if(states.begin(), states.end(), [&](const StateDef& s) { return s.id == id; });
    return it == states.end() ? nullptr : &*it;
}

const StateDef& StateChartDef::state(std::string_view id) const {
    if (const auto* s = find_state(id)) {
        return *s;
    }
    throw InvalidTransition("chart '" + name + "' has no state '" + std::string(id) + "'");
}

const TriggerDef* StateChartDef::find_trigger(std::string_view from, TriggerKind kind,
                                              std::string_view signal) const noexcept {
    for (const auto& t : triggers) {
        if (t.from == from && t.kind == kind && t.signal == signal) {
            return &t;
        }
    }
    return nullptr;
}

std::vector<ChartDefect> validate_chart(const StateChartDef& chart) {
    std::vector<ChartDefect> defects;

    std::set<std::string> seen;
    for (const auto& s : chart.states) {
        if (!seen.insert(s.id).second) {
            defects.push_back({DefectKind::DuplicateId, s.id, "state id declared more than once"});
        }
    }

    const StateDef* idle = nullptr;
    if (chart.idle_id.empty()) {
        defects.push_back({DefectKind::MissingIdle, chart.name, "no idle state declared"});
    } else if ((idle = chart.find_state(chart.idle_id)) == nullptr) {
        defects.push_back({DefectKind::DanglingReference, chart.idle_id, "idle_id names an undeclared state"});
    }

    for (std::size_t i = 0; i < chart.triggers.size(); ++i) {
        const auto& t = chart.triggers[i];
        const std::string subject = "trigger[" + std::to_string(i) + "]";
        const StateDef* from = chart.find_state(t.from);
        if (from == nullptr) {
            defects.push_back({DefectKind::DanglingReference, subject, "from '" + t.from + "' is undeclared"});
        }
        if (chart.find_state(t.to) == nullptr) {
            defects.push_back({DefectKind::DanglingReference, subject, "to '" + t.to + "' is undeclared"});
        }
        if (t.kind == TriggerKind::Timeout && from != nullptr && !has_duration(from->duration)) {
            defects.push_back({DefectKind::MissingDuration, subject, "timeout leaves '" + t.from + "' which has no duration"});
        }
    }

    if (idle == nullptr) {
        return defects;
    }

    if (idle->priority != 0) {
        defects.push_back({DefectKind::IdlePriority, idle->id, "idle priority must be 0"});
    }
    for (const auto& s : chart.states) {
        if (s.id != idle->id && s.priority <= idle->priority) {
            defects.push_back({DefectKind::IdlePriority, s.id, "priority must exceed the idle state's"});
        }
    }

    std::map<std::string, std::vector<std::string>> forward;
    std::map<std::string, std::vector<std::string>> backward;
    for (const auto& t : chart.triggers) {
        if (chart.find_state(t.from) && chart.find_state(t.to)) {
            forward[t.from].push_back(t.to);
            backward[t.to].push_back(t.from);
        }
    }
    auto closure = [&](const std::map<std::string, std::vector<std::string>>& edges) {
        std::set<std::string> reached{idle->id};
        std::deque<std::string> frontier{idle->id};
        while (!frontier.empty()) {
            const std::string at = frontier.front();
            frontier.pop_front();
            if (auto it = edges.find(at); it != edges.end()) {
                for (const auto& next : it->second) {
                    if (reached.insert(next).second) {
                        frontier.push_back(next);
                    }
                }
            }
        }
        return reached;
    };
    const auto reachable = closure(forward);
    const auto returning = closure(backward);

    std::set<std::string> reported;
    for (const auto& s : chart.states) {
        if (!reported.insert(s.id).second) {
            continue;
        }
        if (!reachable.contains(s.id)) {
            defects.push_back({DefectKind::UnreachableState, s.id, "no trigger path from idle"});
        }
        if (!returning.contains(s.id)) {
            defects.push_back({DefectKind::NoReturnToIdle, s.id, "no trigger path back to idle"});
        }
    }
    return defects;
}

StateChartInstance StateChartInstance::start(std::shared_ptr<const StateChartDef> chart, SimTime now) {
    StateChartInstance inst;
    inst.current = chart->idle_id;
    inst.chart = std::move(chart);
    inst.entered_at = now;
    return inst;
}

FireOutcome fire_trigger(StateChartInstance& instance, const TriggerDef& trigger, SimTime now,
                         double remaining_work, const GuardResolver& guards) {
    const StateChartDef& chart = *instance.chart;
    const StateDef& target = chart.state(trigger.to);
    chart.state(trigger.from);
    const StateDef& current = chart.state(instance.current);

    auto guard_passes = [&] {
        if (!trigger.guard) {
            return true;
        }
        if (!guards) {
            throw InvalidTransition("guard '" + *trigger.guard + "' has no resolver");
        }
        return guards(*trigger.guard);
    };

    if (trigger.from == instance.current) {
        // A non-interruptible state leaves only through its own completion.
        if (!current.interruptible && trigger.kind != TriggerKind::Timeout) {
            return fire::Deferred{};
        }
        if (!guard_passes()) {
            return fire::Ignored{};
        }
        instance.current = target.id;
        instance.entered_at = now;
        return fire::Moved{target.id};
    }

    if (trigger.from == chart.idle_id) {
        if (current.interruptible && !instance.suspended && target.priority > current.priority) {
            if (!guard_passes()) {
                return fire::Ignored{};
            }
            Suspension saved{instance.current, remaining_work};
            instance.suspended = saved;
            instance.current = target.id;
            instance.entered_at = now;
            return fire::Interrupted{target.id, std::move(saved)};
        }
        return fire::Deferred{};
    }

    if (instance.suspended && instance.suspended->state == trigger.from) {
        return fire::Deferred{};
    }
    return fire::Ignored{};
}

ResumeOutcome resume_suspended(StateChartInstance& instance, SimTime now) {
    if (!instance.suspended) {
        return resume::NothingToResume{};
    }
    resume::Resumed out{std::move(instance.suspended->state), instance.suspended->remaining};
    instance.suspended.reset();
    instance.current = out.state;
    instance.entered_at = now;
    return out;
}

}  // namespace orgsim
