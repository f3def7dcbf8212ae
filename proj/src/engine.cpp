#include "orgsim/engine.hpp"

#include "orgsim/detail/overloaded.hpp"
#include "orgsim/errors.hpp"

#include <algorithm>
#include <cstdio>

namespace orgsim {

std::string_view to_string(Role role) noexcept {
    switch (role) {
        case Role::Manager: return "manager";
        case Role::Supervisor: return "supervisor";
        case Role::Designer: return "designer";
    }
    return "?";
}

std::string AgentId::str() const {
    std::string out;
    switch (role) {
        case Role::Manager: out = "M"; break;
        case Role::Supervisor: out = "S"; break;
        case Role::Designer: out = "D"; break;
    }
    out += std::to_string(index);
    if (team) {
        out += "/t" + std::to_string(*team);
    }
    return out;
}

std::string event_kind(const Event& ev) {
    return std::visit(detail::overloaded{
                          [](const Message& m) { return "message:" + m.kind; },
                          [](const TimeoutSignal&) { return std::string("timeout"); },
                          [&](const ScheduledSignal& s) {
                              return (ev.target ? "scheduled:" : "system:") + s.kind;
                          },
                      },
                      ev.payload);
}

bool event_before(const Event& a, const Event& b) noexcept {
    if (a.time != b.time) {
        return a.time < b.time;
    }
    if (a.priority != b.priority) {
        return a.priority > b.priority;
    }
    return a.seq < b.seq;
}

namespace {
// std heap algorithms build a max-heap; invert so the front is the minimum.
struct After {
    bool operator()(const Event& a, const Event& b) const noexcept { return event_before(b, a); }
};
}  // namespace

std::uint64_t EventQueue::push(Event ev) {
    if (ev.time < clock_) {
        char buf[96];
        std::snprintf(buf, sizeof buf, "event at t=%.6f scheduled before clock t=%.6f", ev.time, clock_);
        throw TimeTravel(buf);
    }
    ev.seq = next_seq_++;
    const std::uint64_t seq = ev.seq;
    heap_.push_back(std::move(ev));
    std::push_heap(heap_.begin(), heap_.end(), After{});
    return seq;
}

std::optional<Event> EventQueue::pop_next() {
    if (heap_.empty()) {
        return std::nullopt;
    }
    std::pop_heap(heap_.begin(), heap_.end(), After{});
    Event ev = std::move(heap_.back());
    heap_.pop_back();
    clock_ = ev.time;
    return ev;
}

bool hierarchy_allows(const AgentId& from, const AgentId& to) noexcept {
    if (from == to) {
        return false;
    }
    const auto pair = [&](Role a, Role b) { return from.role == a && to.role == b; };
    if (pair(Role::Manager, Role::Supervisor) || pair(Role::Supervisor, Role::Manager)) {
        return true;
    }
    if (pair(Role::Supervisor, Role::Supervisor)) {
        return true;
    }
    const bool same_team = from.team && to.team && *from.team == *to.team;
    if (pair(Role::Supervisor, Role::Designer) || pair(Role::Designer, Role::Supervisor)) {
        return same_team;
    }
    if (pair(Role::Designer, Role::Designer)) {
        return same_team;
    }
    return false;
}

Simulator::Simulator(Model& model, std::uint64_t base_seed, SimTime horizon, int message_priority)
    : model_(model), streams_(base_seed), horizon_(horizon), message_priority_(message_priority) {}

std::uint64_t Simulator::schedule(SimTime time, int priority, std::optional<AgentId> target,
                                  EventPayload payload) {
    Event ev;
    ev.time = time;
    ev.priority = priority;
    ev.target = std::move(target);
    ev.payload = std::move(payload);
    return queue_.push(std::move(ev));
}

std::uint64_t route_message(Simulator& sim, Message msg) {
    if (!sim.model().is_live(msg.from) || !sim.model().is_live(msg.to)) {
        throw RoutingError("message '" + msg.kind + "' between " + msg.from.str() + " and " + msg.to.str() +
                           ": endpoint is not a live agent");
    }
    if (!hierarchy_allows(msg.from, msg.to)) {
        throw RoutingError("message '" + msg.kind + "' from " + msg.from.str() + " to " + msg.to.str() +
                           ": HierarchyViolation");
    }
    msg.send_time = sim.now();
    const AgentId to = msg.to;
    return sim.schedule(sim.now(), sim.message_priority(), to, std::move(msg));
}

std::string format_event_log_line(const Event& ev) {
    char time_buf[64];
    std::snprintf(time_buf, sizeof time_buf, "%.6f", ev.time);
    std::string line = time_buf;
    line += '\t';
    line += std::to_string(ev.seq);
    line += '\t';
    line += event_kind(ev);
    line += '\t';
    line += ev.target ? ev.target->str() : std::string("system");
    return line;
}

RunInfo run_model(Model& model, const RunOptions& options) {
    Simulator sim(model, options.seed, options.horizon, options.message_priority);
    RunInfo info;
    model.start(sim);
    while (const Event* next = sim.queue().peek()) {
        if (next->time > options.horizon) {
            break;
        }
        Event ev = *sim.queue().pop_next();
        if (options.record_event_log) {
            info.event_log.push_back(format_event_log_line(ev));
        }
        model.handle(sim, ev);
        ++info.events_processed;
        info.last_event_time = ev.time;
        if (options.observer) {
            options.observer(ev);
        }
    }
    model.finish(sim);
    return info;
}

}  // namespace orgsim
