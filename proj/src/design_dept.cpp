#include "orgsim/design_dept.hpp"

#include "orgsim/errors.hpp"

#include <algorithm>
#include <numeric>
#include <vector>

namespace orgsim {

namespace {

DurationSpec as_duration(const Distribution& d) {
    if (const auto* c = std::get_if<dist::Constant>(&d)) {
        return duration::ConstantHours{c->value};
    }
    return duration::Sampled{d};
}

TriggerDef trig(TriggerKind kind, std::string_view signal, std::string_view from, std::string_view to,
                std::optional<std::string_view> guard = std::nullopt) {
    TriggerDef t;
    t.kind = kind;
    t.signal = std::string(signal);
    t.from = std::string(from);
    t.to = std::string(to);
    if (guard) {
        t.guard = std::string(*guard);
    }
    return t;
}

}  // namespace

std::shared_ptr<const StateChartDef> make_designer_chart(const ScenarioConstants& constants) {
    using namespace states;
    auto chart = std::make_shared<StateChartDef>();
    chart->name = "designer";
    chart->idle_id = std::string(kIdle);
    chart->states = {
        {std::string(kIdle), 0, true, duration::None{}},
        {std::string(kSeekingSupport), 1, true, as_duration(constants.support_timeout)},
        {std::string(kWorking), 1, true, duration::ComputedAtEntry{}},
        // The session length is drawn when the request is accepted.
        {std::string(kProvidingSupport), 2, false, duration::ComputedAtEntry{}},
        {std::string(kInMeeting), 3, false, as_duration(constants.meeting_duration)},
    };
    using K = TriggerKind;
    chart->triggers = {
        trig(K::Message, messages::kTaskAssigned, kIdle, kWorking, guards::kHasKnowledge),
        trig(K::Message, messages::kTaskAssigned, kIdle, kSeekingSupport, guards::kLacksKnowledge),
        trig(K::Message, messages::kSupportResolved, kSeekingSupport, kWorking),
        trig(K::Message, messages::kSupportUnavailable, kSeekingSupport, kWorking),
        trig(K::Timeout, "", kSeekingSupport, kWorking),
        trig(K::Timeout, "", kWorking, kIdle),
        trig(K::Message, messages::kSupportAccepted, kIdle, kProvidingSupport),
        trig(K::Timeout, "", kProvidingSupport, kIdle),
        trig(K::Scheduled, signals::kMeeting, kIdle, kInMeeting, guards::kAttendsMeeting),
        trig(K::Timeout, "", kInMeeting, kIdle),
    };
    return chart;
}

std::shared_ptr<const StateChartDef> make_coordinator_chart(const ScenarioConstants& constants,
                                                            std::string name) {
    using namespace states;
    auto chart = std::make_shared<StateChartDef>();
    chart->name = std::move(name);
    chart->idle_id = std::string(kIdle);
    chart->states = {
        {std::string(kIdle), 0, true, duration::None{}},
        {std::string(kAllocating), 1, true, duration::ConstantHours{0.0}},
        {std::string(kInMeeting), 3, false, as_duration(constants.meeting_duration)},
    };
    using K = TriggerKind;
    chart->triggers = {
        trig(K::Message, messages::kContractAssigned, kIdle, kAllocating),
        trig(K::Message, messages::kActivityCompleted, kIdle, kAllocating),
        trig(K::Message, messages::kAvailable, kIdle, kAllocating),
        trig(K::Message, messages::kSupportRequest, kIdle, kAllocating),
        trig(K::Scheduled, signals::kContractArrival, kIdle, kAllocating),
        trig(K::Timeout, "", kAllocating, kIdle),
        trig(K::Scheduled, signals::kMeeting, kIdle, kInMeeting, guards::kAttendsMeeting),
        trig(K::Timeout, "", kInMeeting, kIdle),
    };
    return chart;
}

std::size_t trigger_index(const StateChartDef& chart, std::string_view from, std::string_view to, TriggerKind kind,
                          std::string_view signal) {
    for (std::size_t i = 0; i < chart.triggers.size(); ++i) {
        const TriggerDef& t = chart.triggers[i];
        if (t.kind == kind && t.from == from && t.to == to && t.signal == signal) {
            return i;
        }
    }
    throw InvalidTransition("chart '" + chart.name + "' has no " + std::string(to_string(kind)) + " trigger " +
                            std::string(from) + " -> " + std::string(to));
}

RuleTable designer_rules(std::shared_ptr<const StateChartDef> chart, AgentId supervisor, double eta_k) {
    using namespace states;
    using K = TriggerKind;
    struct Indices {
        std::size_t to_working, to_seeking, resolved, unavailable, accepted, meeting;
    };
    const Indices idx{
        trigger_index(*chart, kIdle, kWorking, K::Message, messages::kTaskAssigned),
        trigger_index(*chart, kIdle, kSeekingSupport, K::Message, messages::kTaskAssigned),
        trigger_index(*chart, kSeekingSupport, kWorking, K::Message, messages::kSupportResolved),
        trigger_index(*chart, kSeekingSupport, kWorking, K::Message, messages::kSupportUnavailable),
        trigger_index(*chart, kIdle, kProvidingSupport, K::Message, messages::kSupportAccepted),
        trigger_index(*chart, kIdle, kInMeeting, K::Scheduled, signals::kMeeting),
    };

    return [chart, supervisor, eta_k, idx](const Agent& agent,
                                           const Stimulus& stimulus) -> std::optional<std::vector<Action>> {
        if (std::holds_alternative<TimeoutSignal>(stimulus)) {
            for (std::size_t i = 0; i < chart->triggers.size(); ++i) {
                const TriggerDef& t = chart->triggers[i];
                if (t.kind == K::Timeout && t.from == agent.state()) {
                    return std::vector<Action>{action::FireTrigger{i, -1}};
                }
            }
            return std::nullopt;
        }
        if (const auto* s = std::get_if<ScheduledSignal>(&stimulus)) {
            if (s->kind == signals::kMeeting) {
                return std::vector<Action>{action::FireTrigger{idx.meeting, s->arg}};
            }
            return std::nullopt;
        }

        const auto& msg = std::get<Message>(stimulus);
        const std::int64_t subject = msg.data.subject;
        if (msg.kind == messages::kTaskAssigned) {
            const auto category = static_cast<KnowledgeCategory>(msg.data.related);
            if (agent.attributes().knowledge_of(category) >= msg.data.value) {
                return std::vector<Action>{action::FireTrigger{idx.to_working, subject}};
            }
            return std::vector<Action>{
                action::FireTrigger{idx.to_seeking, subject},
                action::SendMessage{supervisor, std::string(messages::kSupportRequest), msg.data},
            };
        }
        if (msg.kind == messages::kSupportResolved) {
            return std::vector<Action>{action::FireTrigger{idx.resolved, subject}};
        }
        if (msg.kind == messages::kSupportUnavailable) {
            return std::vector<Action>{action::FireTrigger{idx.unavailable, subject}};
        }
        if (msg.kind == messages::kSupportAccepted) {
            return std::vector<Action>{action::FireTrigger{idx.accepted, subject}};
        }
        if (msg.kind == messages::kSupportEnded) {
            const auto category = static_cast<KnowledgeCategory>(msg.data.related);
            const double k = agent.attributes().knowledge_of(category);
            return std::vector<Action>{
                action::UpdateAttribute{knowledge_key(category), transferred_knowledge(k, msg.data.value, eta_k) - k}};
        }
        return std::nullopt;
    };
}

std::size_t assign_contract_to_team(std::span<const double> team_loads) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < team_loads.size(); ++i) {
        if (team_loads[i] < team_loads[best]) {
            best = i;
        }
    }
    return best;
}

double effective_rate(const RateInputs& in, const ScenarioConstants& constants) {
    double g = 1.0;
    if (in.knowledge < in.required_knowledge) {
        g = in.supported ? constants.g_supported : constants.g_unsupported;
    }
    const double team_factor = (1.0 - in.teamwork) + in.teamwork * in.team_mean_communication;
    return std::clamp(in.productivity * g * team_factor, 0.0, 1.0);
}

std::optional<AgentId> allocate_activity(std::span<const AllocationCandidate> idle_candidates) {
    const AllocationCandidate* best = nullptr;
    for (const auto& c : idle_candidates) {
        if (best == nullptr || c.rate > best->rate || (c.rate == best->rate && c.designer < best->designer)) {
            best = &c;
        }
    }
    if (best == nullptr) {
        return std::nullopt;
    }
    return best->designer;
}

SupportOutcome request_support(const SupportRequest& request, std::span<const SupportCandidate> team,
                               const Distribution& session_duration, RngStreams& streams) {
    std::vector<const SupportCandidate*> qualified;
    for (const auto& c : team) {
        if (c.designer != request.requester && c.knowledge >= request.required_knowledge) {
            qualified.push_back(&c);
        }
    }
    if (qualified.empty()) {
        return support::Unsupported{support::Unsupported::Reason::NoQualifiedColleague};
    }
    std::sort(qualified.begin(), qualified.end(), [](const SupportCandidate* a, const SupportCandidate* b) {
        if (a->knowledge != b->knowledge) {
            return a->knowledge > b->knowledge;
        }
        return a->designer < b->designer;
    });
    for (const SupportCandidate* c : qualified) {
        if (!c->idle) {
            continue;
        }
        const double u = streams.stream("decisions:" + c->designer.str()).uniform01();
        if (u < c->willingness_to_support) {
            SupportSession s;
            s.requester = request.requester;
            s.supporter = c->designer;
            s.activity = request.activity;
            s.starts = request.now;
            s.duration = std::max(0.0, draw_sample(streams, "durations:" + c->designer.str(), session_duration));
            s.supporter_knowledge = c->knowledge;
            s.required_knowledge = request.required_knowledge;
            return support::Accepted{s};
        }
    }
    return support::Unsupported{support::Unsupported::Reason::NobodyAvailable};
}

double apply_work_progress(double remaining, double rate, double elapsed) {
    return std::max(0.0, remaining - rate * elapsed);
}

void evolve_attributes(std::span<Attributes> team, std::span<const Traits> traits,
                       std::span<const MemberContext> context, double dt, const ScenarioConstants& constants) {
    const std::size_t n = team.size();
    if (n == 0 || dt <= 0.0) {
        return;
    }
    const std::vector<Attributes> before(team.begin(), team.end());
    for (std::size_t i = 0; i < n; ++i) {
        Attributes& a = team[i];
        const MemberContext& ctx = context[i];
        const double m_i = before[i].communication;

        if (n > 1) {
            // Mean of the differences, so identical levels give exactly zero drift.
            double gap = 0.0;
            for (std::size_t j = 0; j < n; ++j) {
                if (j != i) {
                    gap += before[j].communication - m_i;
                }
            }
            gap /= static_cast<double>(n - 1);
            const double dt_eff = ctx.in_meeting ? dt * constants.kappa_meet : dt;
            a.communication = m_i + constants.eta_m * traits[i].willingness_to_communicate * gap * dt_eff;
        }

        const double target = ctx.working_on
                                  ? 0.5 * (before[i].knowledge_of(*ctx.working_on) + m_i)
                                  : traits[i].base_productivity;
        a.productivity = before[i].productivity + constants.eta_p * (target - before[i].productivity) * dt;
        a.clamp();
    }
}

double transferred_knowledge(double requester_level, double supporter_level, double eta_k) {
    return std::clamp(requester_level + eta_k * (supporter_level - requester_level), 0.0, 1.0);
}

double accrue_cost(std::span<const double> start_skill_means, double dt, double cost_base, double cost_skill) {
    double per_hour = 0.0;
    for (double s : start_skill_means) {
        per_hour += cost_base + cost_skill * s;
    }
    return per_hour * dt;
}

}  // namespace orgsim
