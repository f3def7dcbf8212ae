#pragma once

#include "orgsim/agent_id.hpp"
#include "orgsim/rng.hpp"
#include "orgsim/statechart.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace orgsim {

/// Scenario payload carried by a message. The meaning of each slot is fixed
/// by the message kind.
struct MessageData {
    std::int64_t subject = -1;
    std::int64_t related = -1;
    double value = 0.0;
};

struct Message {
    AgentId from;
    AgentId to;
    std::string kind;
    MessageData data;
    SimTime send_time = 0.0;
};

struct TimeoutSignal {
    std::uint64_t epoch = 0;  // stale when the agent has changed state since
};

struct ScheduledSignal {
    std::string kind;
    std::int64_t arg = 0;
};

using EventPayload = std::variant<Message, TimeoutSignal, ScheduledSignal>;

struct Event {
    SimTime time = 0.0;
    int priority = 0;
    std::uint64_t seq = 0;
    std::optional<AgentId> target;  // empty: system event
    EventPayload payload;
};

/// "message:<kind>", "timeout", "scheduled:<kind>" or "system:<kind>".
std::string event_kind(const Event& ev);

/// The queue's total order: time ascending, priority descending, seq ascending.
bool event_before(const Event& a, const Event& b) noexcept;

/// Future-event list. Binary heap under `event_before`; ties are impossible
/// because seq is unique per queue.
class EventQueue {
public:
    SimTime now() const noexcept { return clock_; }
    std::size_t size() const noexcept { return heap_.size(); }
    bool empty() const noexcept { return heap_.empty(); }

    /// Assigns the next seq and returns it. Throws TimeTravel when
    /// `ev.time` lies before the clock.
    std::uint64_t push(Event ev);

    /// Removes the minimal event and advances the clock to its time.
    std::optional<Event> pop_next();

    const Event* peek() const noexcept { return heap_.empty() ? nullptr : &heap_.front(); }

private:
    std::vector<Event> heap_;
    SimTime clock_ = 0.0;
    std::uint64_t next_seq_ = 0;
};

/// Who may talk to whom: manager and any supervisor (both ways), supervisor
/// and supervisor, supervisor and a designer of its own team, two distinct
/// designers of the same team.
bool hierarchy_allows(const AgentId& from, const AgentId& to) noexcept;

class Simulator;

class Model {
public:
    virtual ~Model() = default;
    virtual void start(Simulator& sim) = 0;
    virtual void handle(Simulator& sim, const Event& ev) = 0;
    virtual void finish(Simulator& sim) { (void)sim; }
    virtual bool is_live(const AgentId& id) const = 0;
};

class Simulator {
public:
    Simulator(Model& model, std::uint64_t base_seed, SimTime horizon, int message_priority = 0);

    SimTime now() const noexcept { return queue_.now(); }
    SimTime horizon() const noexcept { return horizon_; }
    RngStreams& streams() noexcept { return streams_; }
    EventQueue& queue() noexcept { return queue_; }
    const Model& model() const noexcept { return model_; }
    int message_priority() const noexcept { return message_priority_; }

    std::uint64_t schedule(SimTime time, int priority, std::optional<AgentId> target, EventPayload payload);

private:
    Model& model_;
    EventQueue queue_;
    RngStreams streams_;
    SimTime horizon_;
    int message_priority_;
};

/// Delivers `msg` as a message event at the current time. Throws
/// RoutingError for a dead endpoint or a pair outside the hierarchy.
std::uint64_t route_message(Simulator& sim, Message msg);

struct RunOptions {
    std::uint64_t seed = 1;
    SimTime horizon = 0.0;
    int message_priority = 0;
    bool record_event_log = false;
    std::function<void(const Event&)> observer;  // called after each processed event
};

struct RunInfo {
    std::uint64_t events_processed = 0;
    SimTime last_event_time = 0.0;
    std::vector<std::string> event_log;  // tab-separated: time, seq, kind, target
};

std::string format_event_log_line(const Event& ev);

/// Processes events in queue order until the queue is empty or the next
/// event lies beyond the horizon, then calls Model::finish.
RunInfo run_model(Model& model, const RunOptions& options);

}  // namespace orgsim
