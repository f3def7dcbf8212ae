#include "orgsim/design_dept.hpp"
#include "orgsim/errors.hpp"
#include "orgsim/statechart.hpp"

#include <doctest.h>

#include <algorithm>
#include <map>
#include <queue>
#include <random>
#include <set>

using namespace orgsim;

namespace {

StateChartDef minimal_chart() {
    StateChartDef c;
    c.name = "minimal";
    c.idle_id = "Idle";
    c.states = {{"Idle", 0, true, duration::None{}}, {"Working", 1, true, duration::ConstantHours{2.0}}};
    c.triggers = {{TriggerKind::Message, "TaskAssigned", "Idle", "Working", std::nullopt},
                  {TriggerKind::Timeout, "", "Working", "Idle", std::nullopt}};
    return c;
}

std::multiset<DefectKind> kinds(const std::vector<ChartDefect>& defects) {
    std::multiset<DefectKind> out;
    for (const auto& d : defects) {
        out.insert(d.kind);
    }
    return out;
}

std::shared_ptr<const StateChartDef> scenario_chart() { return make_designer_chart(ScenarioConstants{}); }

const TriggerDef& find(const StateChartDef& c, std::string_view from, std::string_view to, TriggerKind kind,
                       std::string_view signal = {}) {
    return c.triggers[trigger_index(c, from, to, kind, signal)];
}

}  // namespace

TEST_CASE("minimal chart validates clean") { CHECK(validate_chart(minimal_chart()).empty()); }

TEST_CASE("idle id naming an undeclared state is a dangling reference") {
    auto c = minimal_chart();
    c.idle_id = "Nowhere";
    const auto defects = validate_chart(c);
    REQUIRE(defects.size() == 1);
    CHECK(defects[0].kind == DefectKind::DanglingReference);
}

TEST_CASE("state without inbound trigger is unreachable") {
    auto c = minimal_chart();
    c.states.push_back({"Orphan", 1, true, duration::ConstantHours{1.0}});
    c.triggers.push_back({TriggerKind::Timeout, "", "Orphan", "Idle", std::nullopt});
    const auto defects = validate_chart(c);
    REQUIRE(defects.size() == 1);
    CHECK(defects[0].kind == DefectKind::UnreachableState);
    CHECK(defects[0].subject == "Orphan");
}

TEST_CASE("state without a path home is reported") {
    auto c = minimal_chart();
    c.states.push_back({"Trap", 2, true, duration::None{}});
    c.triggers.push_back({TriggerKind::Message, "Lure", "Idle", "Trap", std::nullopt});
    CHECK(kinds(validate_chart(c)) == std::multiset{DefectKind::NoReturnToIdle});
}

TEST_CASE("missing idle, duplicates, timeouts without durations") {
    auto c = minimal_chart();
    c.idle_id.clear();
    CHECK(kinds(validate_chart(c)) == std::multiset{DefectKind::MissingIdle});

    c = minimal_chart();
    c.states.push_back({"Working", 1, true, duration::None{}});
    CHECK(kinds(validate_chart(c)).count(DefectKind::DuplicateId) == 1);

    c = minimal_chart();
    c.states[1].duration = duration::None{};
    CHECK(kinds(validate_chart(c)) == std::multiset{DefectKind::MissingDuration});

    c = minimal_chart();
    c.states[1].priority = 0;
    CHECK(kinds(validate_chart(c)) == std::multiset{DefectKind::IdlePriority});
}

TEST_CASE("scenario charts are valid") {
    CHECK(validate_chart(*scenario_chart()).empty());
    CHECK(validate_chart(*make_coordinator_chart(ScenarioConstants{}, "supervisor")).empty());
}

TEST_CASE("fire_trigger outcomes") {
    auto chart = scenario_chart();
    const auto& c = *chart;

    SUBCASE("idle accepts a task") {
        auto inst = StateChartInstance::start(chart);
        const auto out = fire_trigger(inst, find(c, "Idle", "Working", TriggerKind::Message, "TaskAssigned"), 1.0,
                                      0.0, [](std::string_view) { return true; });
        REQUIRE(std::holds_alternative<fire::Moved>(out));
        CHECK(std::get<fire::Moved>(out).to == "Working");
        CHECK(inst.current == "Working");
        CHECK(inst.entered_at == 1.0);
    }

    SUBCASE("a meeting interrupts work and saves the remaining hours") {
        auto inst = StateChartInstance::start(chart);
        fire_trigger(inst, find(c, "Idle", "Working", TriggerKind::Message, "TaskAssigned"), 0.0, 0.0,
                     [](std::string_view) { return true; });
        const auto out = fire_trigger(inst, find(c, "Idle", "InMeeting", TriggerKind::Scheduled, "meeting"), 2.0, 3.0,
                                      [](std::string_view) { return true; });
        REQUIRE(std::holds_alternative<fire::Interrupted>(out));
        const auto& i = std::get<fire::Interrupted>(out);
        CHECK(i.to == "InMeeting");
        CHECK(i.suspended == Suspension{"Working", 3.0});
        CHECK(inst.suspended == Suspension{"Working", 3.0});
    }

    SUBCASE("a meeting cannot be preempted by a support request") {
        auto inst = StateChartInstance::start(chart);
        fire_trigger(inst, find(c, "Idle", "InMeeting", TriggerKind::Scheduled, "meeting"), 0.0, 0.0,
                     [](std::string_view) { return true; });
        const auto out =
            fire_trigger(inst, find(c, "Idle", "ProvidingSupport", TriggerKind::Message, "SupportAccepted"), 0.5);
        CHECK(std::holds_alternative<fire::Deferred>(out));
        CHECK(inst.current == "InMeeting");
    }

    SUBCASE("failing guard ignores") {
        auto inst = StateChartInstance::start(chart);
        const auto out = fire_trigger(inst, find(c, "Idle", "InMeeting", TriggerKind::Scheduled, "meeting"), 0.0, 0.0,
                                      [](std::string_view) { return false; });
        CHECK(std::holds_alternative<fire::Ignored>(out));
        CHECK(inst.current == "Idle");
    }

    SUBCASE("unknown state is an invalid transition") {
        auto inst = StateChartInstance::start(chart);
        TriggerDef bogus{TriggerKind::Message, "x", "Idle", "Nowhere", std::nullopt};
        CHECK_THROWS_AS(fire_trigger(inst, bogus, 0.0), InvalidTransition);
    }
}

TEST_CASE("resume_suspended") {
    auto chart = scenario_chart();
    auto inst = StateChartInstance::start(chart);
    CHECK(std::holds_alternative<resume::NothingToResume>(resume_suspended(inst, 0.0)));

    inst.current = "InMeeting";
    inst.suspended = Suspension{"Working", 3.0};
    const auto out = resume_suspended(inst, 4.0);
    REQUIRE(std::holds_alternative<resume::Resumed>(out));
    CHECK(std::get<resume::Resumed>(out).state == "Working");
    CHECK(std::get<resume::Resumed>(out).remaining == 3.0);
    CHECK(inst.current == "Working");
    CHECK_FALSE(inst.suspended);
}

TEST_CASE("interrupt then resume with no intervening work conserves remaining work exactly") {
    auto chart = scenario_chart();
    const auto& meeting = find(*chart, "Idle", "InMeeting", TriggerKind::Scheduled, "meeting");
    std::mt19937_64 gen(11);
    std::uniform_real_distribution<double> hours(0.0, 100.0);
    for (int i = 0; i < 1000; ++i) {
        auto inst = StateChartInstance::start(chart);
        inst.current = i % 2 == 0 ? "Working" : "SeekingSupport";
        const double remaining = hours(gen);
        fire_trigger(inst, meeting, 1.0, remaining, [](std::string_view) { return true; });
        const auto out = resume_suspended(inst, 2.0);
        REQUIRE(std::holds_alternative<resume::Resumed>(out));
        CHECK(std::get<resume::Resumed>(out).remaining == remaining);
    }
}

TEST_CASE("random walk on a valid chart: one current state, no errors, priority monotonicity") {
    auto chart = scenario_chart();
    const auto& c = *chart;
    std::mt19937_64 gen(2024);
    auto inst = StateChartInstance::start(chart);
    std::uniform_int_distribution<std::size_t> pick(0, c.triggers.size() - 1);
    std::bernoulli_distribution coin(0.5);
    for (int step = 0; step < 10000; ++step) {
        const auto& t = c.triggers[pick(gen)];
        const std::string before = inst.current;
        const bool had_suspension = inst.suspended.has_value();
        const int before_priority = c.state(before).priority;
        FireOutcome out;
        REQUIRE_NOTHROW(out = fire_trigger(inst, t, step, 1.0, [&](std::string_view) { return coin(gen); }));
        REQUIRE(c.find_state(inst.current) != nullptr);
        if (std::holds_alternative<fire::Interrupted>(out)) {
            CHECK(c.state(t.to).priority > before_priority);
            CHECK_FALSE(had_suspension);
        }
        if (std::holds_alternative<fire::Deferred>(out)) {
            CHECK(inst.current == before);
            // Deferral of a preemption request happens only without a strict
            // priority advantage, or when the slot is taken or the state
            // refuses interruption.
            if (t.from == c.idle_id && t.from != before) {
                CHECK((c.state(t.to).priority <= before_priority || had_suspension ||
                       !c.state(before).interruptible));
            }
        }
        if (inst.current == c.idle_id && inst.suspended) {
            resume_suspended(inst, step);
        }
        if (inst.suspended) {
            CHECK(c.state(inst.current).priority > c.state(inst.suspended->state).priority);
        }
    }
}

TEST_CASE("every state of the scenario charts is reached from idle by bounded search") {
    for (const auto& chart : {scenario_chart(), make_coordinator_chart(ScenarioConstants{}, "sup")}) {
        std::map<std::string, int> depth{{chart->idle_id, 0}};
        std::queue<std::string> q;
        q.push(chart->idle_id);
        while (!q.empty()) {
            const auto at = q.front();
            q.pop();
            for (const auto& t : chart->triggers) {
                if (t.from == at && !depth.contains(t.to)) {
                    depth[t.to] = depth[at] + 1;
                    q.push(t.to);
                }
            }
        }
        for (const auto& s : chart->states) {
            REQUIRE(depth.contains(s.id));
            CHECK(depth[s.id] <= static_cast<int>(chart->states.size()));
        }
    }
}

TEST_CASE("scenario priority table") {
    const auto c = scenario_chart();
    CHECK(c->state("Idle").priority == 0);
    CHECK(c->state("Working").priority == 1);
    CHECK(c->state("SeekingSupport").priority == 1);
    CHECK(c->state("ProvidingSupport").priority == 2);
    CHECK(c->state("InMeeting").priority == 3);
    CHECK(c->state("Working").interruptible);
    CHECK(c->state("SeekingSupport").interruptible);
    CHECK_FALSE(c->state("ProvidingSupport").interruptible);
    CHECK_FALSE(c->state("InMeeting").interruptible);
}
