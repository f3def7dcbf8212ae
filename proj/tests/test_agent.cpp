#include "orgsim/agent.hpp"
#include "orgsim/design_dept.hpp"
#include "orgsim/errors.hpp"

#include <doctest.h>

#include <limits>
#include <random>

using namespace orgsim;

namespace {

Stereotype constant_stereotype() {
    Stereotype s;
    s.name = "expert";
    s.knowledge = {dist::Constant{0.2}, dist::Constant{0.9}, dist::Constant{0.4}};
    s.communication = dist::Constant{0.1};
    s.productivity = dist::Constant{0.7};
    s.willingness_to_support = dist::Constant{0.6};
    s.willingness_to_communicate = dist::Constant{0.5};
    s.base_productivity = dist::Constant{0.8};
    return s;
}

const AgentId kDesigner = AgentId::designer(0, 2);
const AgentId kSupervisor = AgentId::supervisor(0, 1);

Agent make_designer(const Stereotype& s = constant_stereotype(), std::uint64_t seed = 1) {
    RngStreams streams(seed);
    return init_agent_from_stereotype(kDesigner, s, make_designer_chart(ScenarioConstants{}), streams);
}

Message task(double theta, KnowledgeCategory cat = KnowledgeCategory::Design) {
    return Message{kSupervisor, kDesigner, std::string(messages::kTaskAssigned),
                   MessageData{7, static_cast<std::int64_t>(cat), theta}, 0.0};
}

}  // namespace

TEST_CASE("constant stereotype is copied exactly") {
    const Agent a = make_designer();
    CHECK(a.attributes().knowledge_of(KnowledgeCategory::Design) == 0.9);
    CHECK(a.attributes().knowledge_of(KnowledgeCategory::Planning) == 0.2);
    CHECK(a.attributes().communication == 0.1);
    CHECK(a.attributes().productivity == 0.7);
    CHECK(a.traits() == Traits{0.6, 0.5, 0.8});
    CHECK(a.is_idle());
    CHECK(a.chart().entered_at == 0.0);
}

TEST_CASE("distributed stereotype fields are in range and reproducible per seed") {
    auto s = constant_stereotype();
    s.communication = dist::Uniform{0.4, 0.6};
    const double first = make_designer(s, 5).attributes().communication;
    CHECK(first >= 0.4);
    CHECK(first <= 0.6);
    CHECK(make_designer(s, 5).attributes().communication == first);
    bool differs = false;
    for (std::uint64_t seed = 6; seed < 20 && !differs; ++seed) {
        differs = make_designer(s, seed).attributes().communication != first;
    }
    CHECK(differs);
}

TEST_CASE("sampled values beyond [0,1] are clamped") {
    auto s = constant_stereotype();
    s.productivity = dist::Uniform{1.5, 2.0};
    CHECK(make_designer(s).attributes().productivity == 1.0);
}

TEST_CASE("incomplete or out-of-range stereotypes are rejected") {
    auto s = constant_stereotype();
    s.willingness_to_support.reset();
    CHECK_THROWS_AS(make_designer(s), BadStereotype);

    s = constant_stereotype();
    s.knowledge[1].reset();
    CHECK_THROWS_AS(make_designer(s), BadStereotype);

    s = constant_stereotype();
    s.communication = dist::Constant{1.5};
    CHECK_THROWS_AS(make_designer(s), BadStereotype);

    s = constant_stereotype();
    s.communication = dist::Uniform{0.6, 0.4};
    CHECK_THROWS_AS(make_designer(s), BadStereotype);
}

TEST_CASE("designer reactions") {
    const auto chart = make_designer_chart(ScenarioConstants{});
    const RuleTable rules = designer_rules(chart, kSupervisor, 0.3);
    const Agent a = make_designer();

    SUBCASE("qualified task goes straight to work") {
        const auto actions = react(a, task(0.9), rules);
        REQUIRE(actions.size() == 1);
        const auto& f = std::get<action::FireTrigger>(actions[0]);
        CHECK(chart->triggers[f.trigger].to == "Working");
        CHECK(f.subject == 7);
    }
    SUBCASE("unqualified task seeks support through the supervisor") {
        const auto actions = react(a, task(0.95), rules);
        REQUIRE(actions.size() == 2);
        CHECK(chart->triggers[std::get<action::FireTrigger>(actions[0]).trigger].to == "SeekingSupport");
        const auto& send = std::get<action::SendMessage>(actions[1]);
        CHECK(send.to == kSupervisor);
        CHECK(send.kind == messages::kSupportRequest);
        CHECK(send.data.subject == 7);
        CHECK(send.data.value == 0.95);
    }
    SUBCASE("unknown message is logged and yields nothing") {
        std::vector<std::string> logged;
        Message odd{kSupervisor, kDesigner, "Gossip", {}, 0.0};
        const auto actions = react(a, odd, rules, [&](std::string_view s) { logged.emplace_back(s); });
        CHECK(actions.empty());
        CHECK(logged.size() == 1);
    }
    SUBCASE("support end transfers knowledge towards the supporter") {
        Message ended{AgentId::designer(0, 3), kDesigner, std::string(messages::kSupportEnded),
                      MessageData{-1, static_cast<std::int64_t>(KnowledgeCategory::Planning), 0.8}, 0.0};
        const auto actions = react(a, ended, rules);
        REQUIRE(actions.size() == 1);
        const auto& u = std::get<action::UpdateAttribute>(actions[0]);
        CHECK(u.key == AttributeKey::KnowledgePlanning);
        CHECK(u.delta == doctest::Approx(0.3 * (0.8 - 0.2)));
    }
    SUBCASE("reactions are pure") {
        const Agent clone = a;
        std::mt19937_64 gen(3);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        for (int i = 0; i < 200; ++i) {
            const auto m = task(u(gen), static_cast<KnowledgeCategory>(i % 3));
            CHECK(react(a, m, rules) == react(clone, m, rules));
        }
    }
}

TEST_CASE("attribute updates always clamp to [0,1]") {
    std::mt19937_64 gen(99);
    std::uniform_real_distribution<double> level(0.0, 1.0);
    const std::vector<double> adversarial{-1e300, -5.0, -1.0, -1e-18, 0.0, 1e-18, 1.0, 5.0, 1e300,
                                          std::numeric_limits<double>::infinity(),
                                          -std::numeric_limits<double>::infinity()};
    for (int i = 0; i < 2000; ++i) {
        Attributes at{{level(gen), level(gen), level(gen)}, level(gen), level(gen)};
        const auto key = kAttributeKeys[static_cast<std::size_t>(i) % kAttributeKeys.size()];
        const double delta = i % 2 == 0 ? adversarial[static_cast<std::size_t>(i / 2) % adversarial.size()]
                                        : (level(gen) - 0.5) * 4.0;
        apply_attribute_update(at, action::UpdateAttribute{key, delta});
        for (const auto k : kAttributeKeys) {
            const double v = attribute_value(at, k);
            REQUIRE(v >= 0.0);
            REQUIRE(v <= 1.0);
        }
    }
}

TEST_CASE("names") {
    CHECK(kDesigner.str() == "D2/t0");
    CHECK(AgentId::manager(0).str() == "M0");
    CHECK(parse_category("testing") == KnowledgeCategory::Testing);
    CHECK_FALSE(parse_category("cooking"));
    CHECK(to_string(AttributeKey::Communication) == "communication");
}
