#include "orgsim/department_model.hpp"

#include "orgsim/detail/overloaded.hpp"
#include "orgsim/errors.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>

namespace orgsim {

Stereotype resolve_stereotype(const DepartmentConfig& dept, const DesignerSlot& slot) {
    const auto it = dept.stereotypes.find(slot.stereotype);
    if (it == dept.stereotypes.end()) {
        throw BadStereotype("unknown stereotype '" + slot.stereotype + "'");
    }
    Stereotype s = it->second;
    const Stereotype& o = slot.overrides;
    for (std::size_t i = 0; i < s.knowledge.size(); ++i) {
        if (o.knowledge[i]) {
            s.knowledge[i] = o.knowledge[i];
        }
    }
    auto take = [](std::optional<Distribution>& dst, const std::optional<Distribution>& src) {
        if (src) {
            dst = src;
        }
    };
    take(s.communication, o.communication);
    take(s.productivity, o.productivity);
    take(s.willingness_to_support, o.willingness_to_support);
    take(s.willingness_to_communicate, o.willingness_to_communicate);
    take(s.base_productivity, o.base_productivity);
    return s;
}

namespace {

namespace sys {
constexpr std::string_view kArrival = "arrival";
constexpr std::string_view kPoissonArrival = "poisson_arrival";
constexpr std::string_view kMeeting = "meeting";
constexpr std::string_view kTick = "tick";
constexpr std::string_view kSample = "sample";
}  // namespace sys

void require_valid(const StateChartDef& chart) {
    const auto defects = validate_chart(chart);
    if (defects.empty()) {
        return;
    }
    std::string msg = "chart '" + chart.name + "' is invalid:";
    for (const auto& d : defects) {
        msg += " " + std::string(to_string(d.kind)) + "(" + d.subject + ")";
    }
    throw InvalidTransition(msg);
}

int replay_priority(const Stimulus& s) {
    if (const auto* sig = std::get_if<ScheduledSignal>(&s)) {
        return sig->kind == signals::kMeeting ? event_priority::kMeeting : event_priority::kArrival;
    }
    if (std::holds_alternative<TimeoutSignal>(s)) {
        return event_priority::kTimeout;
    }
    return event_priority::kMessage;
}

class DesignDepartment final : public Model {
public:
    DesignDepartment(const ScenarioConfig& config, const SimulationOptions& options)
        : cfg_(config),
          k_(config.constants),
          opts_(options),
          designer_chart_(make_designer_chart(config.constants)),
          coordinator_chart_(make_coordinator_chart(config.constants, "coordinator")) {
        require_valid(*designer_chart_);
        require_valid(*coordinator_chart_);
        if (config.department.teams.empty()) {
            throw BadStereotype("department has no teams");
        }
        trace_.horizon = config.horizon;
    }

    void start(Simulator& sim) override {
        sim_ = &sim;
        build_agents(sim.streams());
        const SimTime horizon = sim.horizon();

        for (std::size_t i = 0; i < cfg_.contracts.explicit_contracts.size(); ++i) {
            const SimTime at = cfg_.contracts.explicit_contracts[i].arrival_time;
            if (at <= horizon) {
                system_event(at, event_priority::kArrival, sys::kArrival, static_cast<std::int64_t>(i));
            }
        }
        if (const auto& arr = cfg_.contracts.arrivals; arr && arr->rate > 0.0) {
            schedule_next_arrival(arr->start);
        }
        const double meeting_len = distribution_mean(k_.meeting_duration);
        if (k_.meeting_interval > 0.0 && k_.meeting_interval + meeting_len <= horizon) {
            for (std::size_t t = 0; t < teams_.size(); ++t) {
                system_event(k_.meeting_interval, event_priority::kMeeting, sys::kMeeting,
                             static_cast<std::int64_t>(t));
            }
        }
        system_event(0.0, event_priority::kTick, sys::kTick, 0);
        if (opts_.record_trace && k_.trace_interval > 0.0) {
            system_event(0.0, event_priority::kSample, sys::kSample, 0);
        }
    }

    void handle(Simulator& sim, const Event& ev) override {
        (void)sim;
        if (!ev.target) {
            handle_system(std::get<ScheduledSignal>(ev.payload));
            return;
        }
        handle_agent(agents_.at(static_cast<std::size_t>(ev.target->index)), ev.payload);
    }

    void finish(Simulator& sim) override {
        const SimTime end = sim.horizon();
        for (auto& rt : agents_) {
            if (rt.agent.state() == states::kWorking && rt.activity) {
                // Clip the open stretch of work at the horizon.
                ActivityRecord& act = trace_.activities[*rt.activity];
                const SimTime stop = std::max(end, rt.segment_start);
                act.remaining = apply_work_progress(act.remaining, rt.rate, stop - rt.segment_start);
                push_segment(rt, stop);
            }
        }
        for (auto& c : trace_.contracts) {
            if (c.status != ContractStatus::Completed) {
                c.status = ContractStatus::Failed;
            }
        }
        std::vector<double> skills;
        for (const auto& rt : agents_) {
            skills.push_back(rt.start_skill);
            if (rt.agent.id().role == Role::Designer) {
                trace_.designers.push_back({rt.agent.id(), rt.stereotype, rt.initial, rt.agent.attributes()});
            }
        }
        trace_.total_cost = accrue_cost(skills, end, k_.cost_base, k_.cost_skill);
    }

    bool is_live(const AgentId& id) const override {
        return id.index >= 0 && static_cast<std::size_t>(id.index) < agents_.size();
    }

    ContractCounts counts() const {
        ContractCounts c;
        c.arrived = trace_.contracts.size();
        for (const auto& rec : trace_.contracts) {
            switch (rec.status) {
                case ContractStatus::Queued: ++c.queued; break;
                case ContractStatus::InProgress: ++c.in_progress; break;
                case ContractStatus::Completed: ++c.completed; break;
                case ContractStatus::Failed: ++c.failed; break;
            }
        }
        return c;
    }

    RunTrace take_trace() { return std::move(trace_); }

private:
    struct Runtime {
        Agent agent;
        std::string stereotype;
        Attributes initial;
        double start_skill = 0.0;
        RuleTable rules;
        std::optional<std::size_t> activity;         // held while seeking support or working
        std::optional<std::size_t> support_session;  // as requester
        std::optional<std::size_t> providing;        // as supporter
        bool reserved = false;                       // promised a task or a session
        double rate = 0.0;
        SimTime segment_start = 0.0;
        SimTime timeout_at = 0.0;
    };

    struct Team {
        std::size_t supervisor = 0;
        std::vector<std::size_t> designers;
        std::deque<std::size_t> queue;  // unallocated activities, FIFO
    };

    // ---- construction ----

    const Stereotype& named_stereotype(const std::string& name) const {
        const auto it = cfg_.department.stereotypes.find(name);
        if (it == cfg_.department.stereotypes.end()) {
            throw BadStereotype("unknown stereotype '" + name + "'");
        }
        return it->second;
    }

    void add_agent(const AgentId& id, const Stereotype& st, RngStreams& streams) {
        const auto& chart = id.role == Role::Designer ? designer_chart_ : coordinator_chart_;
        Agent agent = init_agent_from_stereotype(id, st, chart, streams);
        Runtime rt{std::move(agent), st.name, {}, 0.0, {}, {}, {}, {}, false, 0.0, 0.0, 0.0};
        rt.initial = rt.agent.attributes();
        rt.start_skill = rt.initial.mean_level();
        agents_.push_back(std::move(rt));
    }

    void build_agents(RngStreams& streams) {
        const auto& dept = cfg_.department;
        int next = 0;
        add_agent(AgentId::manager(next++), named_stereotype(dept.manager_stereotype), streams);
        for (std::size_t t = 0; t < dept.teams.size(); ++t) {
            const int team = static_cast<int>(t);
            Team tm;
            tm.supervisor = static_cast<std::size_t>(next);
            add_agent(AgentId::supervisor(team, next++), named_stereotype(dept.teams[t].supervisor_stereotype),
                      streams);
            for (const auto& slot : dept.teams[t].designers) {
                const Stereotype st = resolve_stereotype(dept, slot);
                for (int c = 0; c < slot.count; ++c) {
                    tm.designers.push_back(static_cast<std::size_t>(next));
                    add_agent(AgentId::designer(team, next++), st, streams);
                }
            }
            if (tm.designers.empty()) {
                throw BadStereotype("team " + std::to_string(t) + " has no designers");
            }
            teams_.push_back(std::move(tm));
        }
        agents_[0].rules = manager_rules();
        for (std::size_t t = 0; t < teams_.size(); ++t) {
            agents_[teams_[t].supervisor].rules = supervisor_rules(t);
            const AgentId sup = agents_[teams_[t].supervisor].agent.id();
            for (std::size_t d : teams_[t].designers) {
                agents_[d].rules = designer_rules(designer_chart_, sup, k_.eta_k);
            }
        }
    }

    // ---- rule tables of the coordinating roles ----

    RuleTable manager_rules() {
        const auto& chart = *coordinator_chart_;
        const std::size_t on_arrival = trigger_index(chart, states::kIdle, states::kAllocating,
                                                     TriggerKind::Scheduled, signals::kContractArrival);
        return [this, on_arrival](const Agent& agent, const Stimulus& s) -> std::optional<std::vector<Action>> {
            if (std::holds_alternative<TimeoutSignal>(s)) {
                return timeout_rule(agent);
            }
            const auto* sig = std::get_if<ScheduledSignal>(&s);
            if (sig == nullptr || sig->kind != signals::kContractArrival) {
                return std::nullopt;
            }
            std::vector<Action> out{action::FireTrigger{on_arrival, sig->arg}};
            if (!agent.is_idle()) {
                return out;
            }
            std::vector<double> loads(teams_.size(), 0.0);
            for (const auto& c : trace_.contracts) {
                if (c.status != ContractStatus::InProgress || !c.team) {
                    continue;
                }
                for (std::size_t a : c.activities) {
                    loads[static_cast<std::size_t>(*c.team)] += trace_.activities[a].remaining;
                }
            }
            const std::size_t team = assign_contract_to_team(loads);
            MessageData data;
            data.subject = sig->arg;
            data.related = static_cast<std::int64_t>(team);
            out.push_back(action::SendMessage{agents_[teams_[team].supervisor].agent.id(),
                                              std::string(messages::kContractAssigned), data});
            return out;
        };
    }

    RuleTable supervisor_rules(std::size_t team) {
        const auto& chart = *coordinator_chart_;
        auto idx = [&](std::string_view kind) {
            return trigger_index(chart, states::kIdle, states::kAllocating, TriggerKind::Message, kind);
        };
        const std::size_t on_contract = idx(messages::kContractAssigned);
        const std::size_t on_completed = idx(messages::kActivityCompleted);
        const std::size_t on_available = idx(messages::kAvailable);
        const std::size_t on_request = idx(messages::kSupportRequest);
        const std::size_t on_meeting =
            trigger_index(chart, states::kIdle, states::kInMeeting, TriggerKind::Scheduled, signals::kMeeting);

        return [=, this](const Agent& agent, const Stimulus& s) -> std::optional<std::vector<Action>> {
            if (std::holds_alternative<TimeoutSignal>(s)) {
                return timeout_rule(agent);
            }
            if (const auto* sig = std::get_if<ScheduledSignal>(&s)) {
                if (sig->kind == signals::kMeeting) {
                    return std::vector<Action>{action::FireTrigger{on_meeting, sig->arg}};
                }
                return std::nullopt;
            }
            const auto& msg = std::get<Message>(s);
            std::size_t trig = 0;
            if (msg.kind == messages::kContractAssigned) {
                trig = on_contract;
            } else if (msg.kind == messages::kActivityCompleted) {
                trig = on_completed;
            } else if (msg.kind == messages::kAvailable) {
                trig = on_available;
            } else if (msg.kind == messages::kSupportRequest) {
                trig = on_request;
            } else {
                return std::nullopt;
            }
            std::vector<Action> out{action::FireTrigger{trig, msg.data.subject}};
            if (!agent.is_idle()) {
                return out;  // deferred until the supervisor is free
            }
            if (msg.kind == messages::kSupportRequest) {
                append_support_reply(team, msg, out);
                return out;
            }
            const std::size_t before = out.size();
            append_dispatch(team, out);
            if (out.size() == before) {
                return std::vector<Action>{};
            }
            return out;
        };
    }

    std::optional<std::vector<Action>> timeout_rule(const Agent& agent) const {
        const auto& triggers = agent.chart().chart->triggers;
        for (std::size_t i = 0; i < triggers.size(); ++i) {
            if (triggers[i].kind == TriggerKind::Timeout && triggers[i].from == agent.state()) {
                return std::vector<Action>{action::FireTrigger{i, -1}};
            }
        }
        return std::nullopt;
    }

    bool available_for_work(const Runtime& rt) const { return rt.agent.is_idle() && !rt.reserved; }

    double team_mean_communication(std::size_t team) const {
        double sum = 0.0;
        for (std::size_t d : teams_[team].designers) {
            sum += agents_[d].agent.attributes().communication;
        }
        return sum / static_cast<double>(teams_[team].designers.size());
    }

    double teamwork_of(const ActivityRecord& act) const { return trace_.contracts[act.contract].teamwork; }

    void append_dispatch(std::size_t team, std::vector<Action>& out) const {
        std::vector<std::size_t> free;
        for (std::size_t d : teams_[team].designers) {
            if (available_for_work(agents_[d])) {
                free.push_back(d);
            }
        }
        const double mean_m = team_mean_communication(team);
        for (std::size_t a : teams_[team].queue) {
            if (free.empty()) {
                break;
            }
            const ActivityRecord& act = trace_.activities[a];
            std::vector<AllocationCandidate> candidates;
            for (std::size_t d : free) {
                const Attributes& attrs = agents_[d].agent.attributes();
                RateInputs in{attrs.productivity, attrs.knowledge_of(act.category), act.required_knowledge,
                              teamwork_of(act), mean_m, false};
                candidates.push_back({agents_[d].agent.id(), effective_rate(in, k_)});
            }
            const auto chosen = allocate_activity(candidates);
            if (!chosen) {
                break;
            }
            out.push_back(action::SendMessage{*chosen, std::string(messages::kTaskAssigned), activity_data(a)});
            std::erase(free, static_cast<std::size_t>(chosen->index));
        }
    }

    void append_support_reply(std::size_t team, const Message& request, std::vector<Action>& out) const {
        const auto category = static_cast<KnowledgeCategory>(request.data.related);
        std::vector<SupportCandidate> candidates;
        for (std::size_t d : teams_[team].designers) {
            const Runtime& rt = agents_[d];
            candidates.push_back({rt.agent.id(), rt.agent.attributes().knowledge_of(category), available_for_work(rt),
                                  rt.agent.traits().willingness_to_support});
        }
        const SupportRequest req{request.from, request.data.subject, request.data.value, sim_->now()};
        const SupportOutcome outcome = request_support(req, candidates, k_.support_duration, sim_->streams());
        if (const auto* acc = std::get_if<support::Accepted>(&outcome)) {
            MessageData offer;
            offer.subject = acc->session.activity;
            offer.related = request.from.index;
            offer.value = acc->session.duration;
            out.push_back(action::SendMessage{acc->session.supporter, std::string(messages::kSupportAccepted), offer});
            out.push_back(action::SendMessage{request.from, std::string(messages::kSupportResolved), request.data});
        } else {
            out.push_back(action::SendMessage{request.from, std::string(messages::kSupportUnavailable), request.data});
        }
    }

    MessageData activity_data(std::size_t a) const {
        const ActivityRecord& act = trace_.activities[a];
        MessageData data;
        data.subject = static_cast<std::int64_t>(a);
        data.related = static_cast<std::int64_t>(act.category);
        data.value = act.required_knowledge;
        return data;
    }

    // ---- system events ----

    void system_event(SimTime at, int priority, std::string_view kind, std::int64_t arg) {
        sim_->schedule(at, priority, std::nullopt, ScheduledSignal{std::string(kind), arg});
    }

    void handle_system(const ScheduledSignal& sig) {
        if (sig.kind == sys::kArrival) {
            const auto& spec = cfg_.contracts.explicit_contracts[static_cast<std::size_t>(sig.arg)];
            announce(add_contract(spec.id, spec.arrival_time, spec.deadline, spec.teamwork, spec.activities));
        } else if (sig.kind == sys::kPoissonArrival) {
            generate_contract();
            schedule_next_arrival(sim_->now());
        } else if (sig.kind == sys::kMeeting) {
            start_meeting(static_cast<std::size_t>(sig.arg));
        } else if (sig.kind == sys::kTick) {
            tick(sig.arg);
        } else if (sig.kind == sys::kSample) {
            record_sample(sig.arg);
        }
    }

    std::size_t add_contract(const std::string& id, SimTime arrival, SimTime deadline, std::optional<double> teamwork,
                             const std::vector<ActivitySpec>& activities) {
        ContractRecord c;
        c.id = id;
        c.arrival_time = arrival;
        c.deadline = deadline;
        c.teamwork = teamwork.value_or(k_.default_teamwork);
        const std::size_t index = trace_.contracts.size();
        for (const auto& spec : activities) {
            ActivityRecord a;
            a.contract = index;
            a.category = spec.category;
            a.effort = spec.effort;
            a.required_knowledge = spec.required_knowledge;
            a.remaining = spec.effort;
            c.activities.push_back(trace_.activities.size());
            trace_.activities.push_back(a);
        }
        trace_.contracts.push_back(std::move(c));
        return index;
    }

    void announce(std::size_t contract) {
        sim_->schedule(sim_->now(), event_priority::kArrival, agents_[0].agent.id(),
                       ScheduledSignal{std::string(signals::kContractArrival), static_cast<std::int64_t>(contract)});
    }

    void schedule_next_arrival(SimTime from) {
        const ArrivalProcess& arr = *cfg_.contracts.arrivals;
        const double gap = draw_sample(sim_->streams(), "arrivals", dist::Exponential{1.0 / arr.rate});
        const SimTime at = from + gap;
        if (at <= sim_->horizon()) {
            system_event(at, event_priority::kArrival, sys::kPoissonArrival, -1);
        }
    }

    void generate_contract() {
        const ArrivalProcess& arr = *cfg_.contracts.arrivals;
        RandomStream& stream = sim_->streams().stream("arrivals");
        const SimTime now = sim_->now();
        const double offset = std::max(sample(stream, arr.deadline_offset), 1e-6);

        double total_weight = 0.0;
        for (const auto& t : arr.templates) {
            total_weight += t.weight;
        }
        std::vector<ActivitySpec> acts;
        for (int i = 0; i < arr.activities_per_contract && !arr.templates.empty(); ++i) {
            const double pick = stream.uniform01() * total_weight;
            const ActivityTemplate* chosen = &arr.templates.back();
            double acc = 0.0;
            for (const auto& t : arr.templates) {
                acc += t.weight;
                if (pick < acc) {
                    chosen = &t;
                    break;
                }
            }
            ActivitySpec spec;
            spec.category = chosen->category;
            spec.effort = std::max(sample(stream, chosen->effort), 1e-6);
            spec.required_knowledge = std::clamp(sample(stream, chosen->required_knowledge), 0.0, 1.0);
            acts.push_back(spec);
        }
        const std::string id = "arr-" + std::to_string(++generated_);
        announce(add_contract(id, now, now + offset, arr.teamwork, acts));
    }

    void start_meeting(std::size_t team) {
        const SimTime now = sim_->now();
        const ScheduledSignal signal{std::string(signals::kMeeting), static_cast<std::int64_t>(team)};
        sim_->schedule(now, event_priority::kMeeting, agents_[teams_[team].supervisor].agent.id(), signal);
        for (std::size_t d : teams_[team].designers) {
            sim_->schedule(now, event_priority::kMeeting, agents_[d].agent.id(), signal);
        }
        const SimTime next = now + k_.meeting_interval;
        if (next + distribution_mean(k_.meeting_duration) <= sim_->horizon()) {
            system_event(next, event_priority::kMeeting, sys::kMeeting, static_cast<std::int64_t>(team));
        }
    }

    double tick_step() const {
        double h = k_.attribute_step;
        const double inf = std::numeric_limits<double>::infinity();
        h = std::min(h, k_.eta_m * k_.kappa_meet > 0.0 ? 0.5 / (k_.eta_m * std::max(k_.kappa_meet, 1.0)) : inf);
        h = std::min(h, k_.eta_p > 0.0 ? 0.5 / k_.eta_p : inf);
        return h;
    }

    void tick(std::int64_t n) {
        const double h = tick_step();
        const SimTime now = static_cast<double>(n) * h;
        const double dt = std::min(h, sim_->horizon() - now);
        if (dt > 0.0) {
            for (const Team& tm : teams_) {
                std::vector<Attributes> attrs;
                std::vector<Traits> traits;
                std::vector<MemberContext> ctx;
                for (std::size_t d : tm.designers) {
                    const Runtime& rt = agents_[d];
                    attrs.push_back(rt.agent.attributes());
                    traits.push_back(rt.agent.traits());
                    MemberContext c;
                    c.in_meeting = rt.agent.state() == states::kInMeeting;
                    if (rt.agent.state() == states::kWorking && rt.activity) {
                        c.working_on = trace_.activities[*rt.activity].category;
                    }
                    ctx.push_back(c);
                }
                evolve_attributes(attrs, traits, ctx, dt, k_);
                for (std::size_t i = 0; i < tm.designers.size(); ++i) {
                    agents_[tm.designers[i]].agent.attributes() = attrs[i];
                }
            }
        }
        const SimTime next = static_cast<double>(n + 1) * h;
        if (next < sim_->horizon()) {
            system_event(next, event_priority::kTick, sys::kTick, n + 1);
        }
    }

    void record_sample(std::int64_t n) {
        const SimTime now = sim_->now();
        for (const Team& tm : teams_) {
            for (std::size_t d : tm.designers) {
                const Runtime& rt = agents_[d];
                for (AttributeKey key : kAttributeKeys) {
                    trace_.samples.push_back({now, rt.agent.id(), key, attribute_value(rt.agent.attributes(), key)});
                }
            }
        }
        const SimTime next = static_cast<double>(n + 1) * k_.trace_interval;
        if (next <= sim_->horizon()) {
            system_event(next, event_priority::kSample, sys::kSample, n + 1);
        }
    }

    // ---- agent events ----

    void handle_agent(Runtime& rt, const Stimulus& stimulus) {
        if (const auto* t = std::get_if<TimeoutSignal>(&stimulus); t && t->epoch != rt.agent.epoch()) {
            return;  // the state it belonged to is gone
        }
        const std::vector<Action> actions = react(rt.agent, stimulus, rt.rules, opts_.diagnostics);
        const bool was_idle = rt.agent.is_idle();
        bool changed = false;
        notified_ = false;
        for (const Action& a : actions) {
            bool stop = false;
            std::visit(detail::overloaded{
                           [&](const action::FireTrigger& f) {
                               switch (fire(rt, f)) {
                                   case Fired::Changed: changed = true; break;
                                   case Fired::Deferred: rt.agent.deferred().push_back(stimulus); stop = true; break;
                                   case Fired::Ignored: stop = true; break;
                               }
                           },
                           [&](const action::SendMessage& m) { send(rt, m); },
                           [&](const action::ScheduleEvent& e) {
                               sim_->schedule(sim_->now() + e.delay, event_priority::kArrival, rt.agent.id(),
                                              ScheduledSignal{e.kind, e.arg});
                           },
                           [&](const action::UpdateAttribute& u) { apply_attribute_update(rt.agent.attributes(), u); },
                       },
                       a);
            if (stop) {
                break;
            }
        }
        if (changed) {
            settle(rt, was_idle);
        }
    }

    enum class Fired { Changed, Deferred, Ignored };

    Fired fire(Runtime& rt, const action::FireTrigger& f) {
        const TriggerDef& trig = rt.agent.chart().chart->triggers.at(f.trigger);
        const std::string old = rt.agent.state();
        const SimTime now = sim_->now();

        double remaining = 0.0;
        if (old == states::kWorking && rt.activity) {
            remaining = apply_work_progress(trace_.activities[*rt.activity].remaining, rt.rate, now - rt.segment_start);
        } else if (old == states::kSeekingSupport) {
            remaining = std::max(0.0, rt.timeout_at - now);
        }

        auto resolve = [&](std::string_view g) -> bool {
            if (g == guards::kAttendsMeeting) {
                if (k_.meeting_attendance >= 1.0) {
                    return true;
                }
                return draw_sample(sim_->streams(), "decisions:" + rt.agent.id().str(),
                                   dist::Bernoulli{k_.meeting_attendance}) != 0.0;
            }
            const ActivityRecord& act = trace_.activities.at(static_cast<std::size_t>(f.subject));
            const bool has = rt.agent.attributes().knowledge_of(act.category) >= act.required_knowledge;
            if (g == guards::kHasKnowledge) {
                return has;
            }
            if (g == guards::kLacksKnowledge) {
                return !has;
            }
            throw InvalidTransition("unknown guard '" + std::string(g) + "'");
        };

        const FireOutcome outcome = fire_trigger(rt.agent.chart(), trig, now, remaining, resolve);
        return std::visit(detail::overloaded{
                              [&](const fire::Moved& m) {
                                  on_exit(rt, old, false, remaining);
                                  on_enter(rt, m.to, f.subject, std::nullopt);
                                  return Fired::Changed;
                              },
                              [&](const fire::Interrupted& i) {
                                  on_exit(rt, old, true, remaining);
                                  on_enter(rt, i.to, f.subject, std::nullopt);
                                  return Fired::Changed;
                              },
                              [](const fire::Ignored&) { return Fired::Ignored; },
                              [](const fire::Deferred&) { return Fired::Deferred; },
                          },
                          outcome);
    }

    void push_segment(const Runtime& rt, SimTime end) {
        if (end > rt.segment_start) {
            trace_.segments.push_back({*rt.activity, rt.agent.id(), rt.segment_start, end, rt.rate});
        }
    }

    void on_exit(Runtime& rt, const std::string& state, bool interrupted, double remaining) {
        const SimTime now = sim_->now();
        if (state == states::kWorking && rt.activity) {
            push_segment(rt, now);
            ActivityRecord& act = trace_.activities[*rt.activity];
            if (interrupted) {
                act.remaining = remaining;
                return;
            }
            act.remaining = 0.0;
            act.completed_at = now;
            complete_if_done(act.contract, now);
            const std::size_t done = *rt.activity;
            rt.activity.reset();
            rt.support_session.reset();
            MessageData data;
            data.subject = static_cast<std::int64_t>(done);
            send(rt, action::SendMessage{supervisor_of(rt), std::string(messages::kActivityCompleted), data});
            notified_ = true;
        } else if (state == states::kProvidingSupport && rt.providing) {
            const SupportSession& s = trace_.support_sessions[*rt.providing];
            const ActivityRecord& act = trace_.activities[static_cast<std::size_t>(s.activity)];
            MessageData data;
            data.subject = s.activity;
            data.related = static_cast<std::int64_t>(act.category);
            data.value = rt.agent.attributes().knowledge_of(act.category);
            rt.providing.reset();
            send(rt, action::SendMessage{s.requester, std::string(messages::kSupportEnded), data});
        }
    }

    void on_enter(Runtime& rt, const std::string& state, std::int64_t subject, std::optional<double> resumed) {
        rt.agent.bump_epoch();
        const SimTime now = sim_->now();
        const StateDef& def = rt.agent.chart().chart->state(state);

        if (state == states::kWorking) {
            if (!resumed && subject >= 0) {
                rt.activity = static_cast<std::size_t>(subject);
            }
            rt.reserved = false;
            ActivityRecord& act = trace_.activities[*rt.activity];
            act.assignee = rt.agent.id();
            rt.rate = working_rate(rt, act, now);
            rt.segment_start = now;
            if (rt.rate > 0.0) {
                schedule_timeout(rt, now + act.remaining / rt.rate);
            } else if (act.remaining <= 0.0) {
                schedule_timeout(rt, now);
            }
            return;
        }
        if (state == states::kSeekingSupport) {
            if (!resumed) {
                rt.activity = static_cast<std::size_t>(subject);
                trace_.activities[*rt.activity].assignee = rt.agent.id();
            }
            rt.reserved = false;
            const double d = resumed ? *resumed : fixed_duration(rt, def);
            rt.timeout_at = now + d;
            schedule_timeout(rt, rt.timeout_at);
            return;
        }
        if (state == states::kProvidingSupport) {
            rt.providing = static_cast<std::size_t>(subject);
            rt.reserved = false;
            schedule_timeout(rt, now + trace_.support_sessions[*rt.providing].duration);
            return;
        }
        if (has_duration(def.duration)) {
            schedule_timeout(rt, now + (resumed ? *resumed : fixed_duration(rt, def)));
        }
    }

    double fixed_duration(Runtime& rt, const StateDef& def) {
        if (const auto* c = std::get_if<duration::ConstantHours>(&def.duration)) {
            return c->hours;
        }
        if (const auto* s = std::get_if<duration::Sampled>(&def.duration)) {
            return std::max(0.0, draw_sample(sim_->streams(), "durations:" + rt.agent.id().str(), s->distribution));
        }
        return 0.0;
    }

    double working_rate(const Runtime& rt, const ActivityRecord& act, SimTime now) const {
        bool supported = false;
        if (rt.support_session) {
            const SupportSession& s = trace_.support_sessions[*rt.support_session];
            supported = now >= s.starts && now < s.starts + s.duration;
        }
        const Attributes& attrs = rt.agent.attributes();
        const RateInputs in{attrs.productivity, attrs.knowledge_of(act.category), act.required_knowledge,
                            teamwork_of(act), team_mean_communication(static_cast<std::size_t>(*rt.agent.id().team)),
                            supported};
        return effective_rate(in, k_);
    }

    void schedule_timeout(const Runtime& rt, SimTime at) {
        sim_->schedule(std::max(at, sim_->now()), event_priority::kTimeout, rt.agent.id(),
                       TimeoutSignal{rt.agent.epoch()});
    }

    void settle(Runtime& rt, bool was_idle) {
        const SimTime now = sim_->now();
        if (rt.agent.is_idle()) {
            const ResumeOutcome r = resume_suspended(rt.agent.chart(), now);
            if (const auto* res = std::get_if<resume::Resumed>(&r)) {
                on_enter(rt, res->state, -1, res->remaining);
            }
        }
        std::deque<Stimulus> pending;
        pending.swap(rt.agent.deferred());
        for (auto& s : pending) {
            const int prio = replay_priority(s);
            sim_->schedule(now, prio, rt.agent.id(), std::move(s));
        }
        if (rt.agent.id().role == Role::Designer && rt.agent.is_idle() && !was_idle && !notified_) {
            send(rt, action::SendMessage{supervisor_of(rt), std::string(messages::kAvailable), {}});
        }
    }

    void complete_if_done(std::size_t contract, SimTime now) {
        ContractRecord& c = trace_.contracts[contract];
        for (std::size_t a : c.activities) {
            if (!trace_.activities[a].completed_at) {
                return;
            }
        }
        c.status = ContractStatus::Completed;
        c.completed_at = now;
    }

    AgentId supervisor_of(const Runtime& rt) const {
        return agents_[teams_[static_cast<std::size_t>(*rt.agent.id().team)].supervisor].agent.id();
    }

    // Applies the bookkeeping a message implies on the sender's side, then routes it.
    void send(Runtime& from, action::SendMessage m) {
        if (m.kind == messages::kContractAssigned) {
            ContractRecord& c = trace_.contracts[static_cast<std::size_t>(m.data.subject)];
            const auto team = static_cast<std::size_t>(m.data.related);
            c.status = ContractStatus::InProgress;
            c.team = static_cast<int>(team);
            for (std::size_t a : c.activities) {
                teams_[team].queue.push_back(a);
            }
        } else if (m.kind == messages::kTaskAssigned) {
            const auto a = static_cast<std::size_t>(m.data.subject);
            auto& queue = teams_[static_cast<std::size_t>(*m.to.team)].queue;
            queue.erase(std::remove(queue.begin(), queue.end(), a), queue.end());
            trace_.activities[a].assignee = m.to;
            agents_[static_cast<std::size_t>(m.to.index)].reserved = true;
        } else if (m.kind == messages::kSupportAccepted) {
            Runtime& supporter = agents_[static_cast<std::size_t>(m.to.index)];
            Runtime& requester = agents_[static_cast<std::size_t>(m.data.related)];
            const ActivityRecord& act = trace_.activities[static_cast<std::size_t>(m.data.subject)];
            SupportSession s;
            s.requester = requester.agent.id();
            s.supporter = supporter.agent.id();
            s.activity = m.data.subject;
            s.starts = sim_->now();
            s.duration = m.data.value;
            s.supporter_knowledge = supporter.agent.attributes().knowledge_of(act.category);
            s.required_knowledge = act.required_knowledge;
            const std::size_t index = trace_.support_sessions.size();
            trace_.support_sessions.push_back(s);
            requester.support_session = index;
            supporter.reserved = true;
            m.data.subject = static_cast<std::int64_t>(index);
        }
        route_message(*sim_, Message{from.agent.id(), m.to, std::move(m.kind), m.data, sim_->now()});
    }

    const ScenarioConfig& cfg_;
    const ScenarioConstants& k_;
    SimulationOptions opts_;
    std::shared_ptr<const StateChartDef> designer_chart_;
    std::shared_ptr<const StateChartDef> coordinator_chart_;
    Simulator* sim_ = nullptr;
    std::vector<Runtime> agents_;  // position == AgentId::index
    std::vector<Team> teams_;
    RunTrace trace_;
    std::size_t generated_ = 0;
    bool notified_ = false;
};

}  // namespace

RunResult simulate(const ScenarioConfig& config, std::uint64_t seed, const SimulationOptions& options) {
    DesignDepartment model(config, options);
    RunOptions run;
    run.seed = seed;
    run.horizon = config.horizon;
    run.message_priority = event_priority::kMessage;
    run.record_event_log = options.record_event_log;
    if (options.observer) {
        run.observer = [&](const Event& ev) { options.observer(ev, model.counts()); };
    }
    RunResult result;
    result.info = run_model(model, run);
    result.trace = model.take_trace();
    result.metrics = collect_metrics(result.trace);
    return result;
}

}  // namespace orgsim
