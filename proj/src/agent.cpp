#include "orgsim/agent.hpp"

#include "orgsim/detail/overloaded.hpp"
#include "orgsim/errors.hpp"

#include <algorithm>
#include <cmath>

namespace orgsim {

namespace {
double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }
}  // namespace

std::string_view to_string(KnowledgeCategory c) noexcept {
    switch (c) {
        case KnowledgeCategory::Planning: return "planning";
        case KnowledgeCategory::Design: return "design";
        case KnowledgeCategory::Testing: return "testing";
    }
    return "?";
}

std::optional<KnowledgeCategory> parse_category(std::string_view name) noexcept {
    for (auto c : kKnowledgeCategories) {
        if (to_string(c) == name) {
            return c;
        }
    }
    return std::nullopt;
}

void Attributes::clamp() {
    for (auto& k : knowledge) {
        k = clamp01(k);
    }
    communication = clamp01(communication);
    productivity = clamp01(productivity);
}

double Attributes::mean_level() const {
    return (knowledge[0] + knowledge[1] + knowledge[2] + communication + productivity) / 5.0;
}

std::string_view to_string(AttributeKey key) noexcept {
    switch (key) {
        case AttributeKey::KnowledgePlanning: return "knowledge.planning";
        case AttributeKey::KnowledgeDesign: return "knowledge.design";
        case AttributeKey::KnowledgeTesting: return "knowledge.testing";
        case AttributeKey::Communication: return "communication";
        case AttributeKey::Productivity: return "productivity";
    }
    return "?";
}

AttributeKey knowledge_key(KnowledgeCategory c) noexcept {
    switch (c) {
        case KnowledgeCategory::Planning: return AttributeKey::KnowledgePlanning;
        case KnowledgeCategory::Design: return AttributeKey::KnowledgeDesign;
        case KnowledgeCategory::Testing: return AttributeKey::KnowledgeTesting;
    }
    return AttributeKey::KnowledgeDesign;
}

namespace {
double& attribute_ref(Attributes& attrs, AttributeKey key) noexcept {
    switch (key) {
        case AttributeKey::KnowledgePlanning: return attrs.knowledge[0];
        case AttributeKey::KnowledgeDesign: return attrs.knowledge[1];
        case AttributeKey::KnowledgeTesting: return attrs.knowledge[2];
        case AttributeKey::Communication: return attrs.communication;
        case AttributeKey::Productivity: return attrs.productivity;
    }
    return attrs.productivity;
}
}  // namespace

double attribute_value(const Attributes& attrs, AttributeKey key) noexcept {
    switch (key) {
        case AttributeKey::KnowledgePlanning: return attrs.knowledge[0];
        case AttributeKey::KnowledgeDesign: return attrs.knowledge[1];
        case AttributeKey::KnowledgeTesting: return attrs.knowledge[2];
        case AttributeKey::Communication: return attrs.communication;
        case AttributeKey::Productivity: return attrs.productivity;
    }
    return 0.0;
}

Agent init_agent_from_stereotype(const AgentId& id, const Stereotype& stereotype,
                                 std::shared_ptr<const StateChartDef> chart, RngStreams& streams) {
    RandomStream& stream = streams.stream("init:" + id.str());
    auto level = [&](const std::optional<Distribution>& field, std::string_view field_name) {
        const std::string where = "stereotype '" + stereotype.name + "' field '" + std::string(field_name) + "'";
        if (!field) {
            throw BadStereotype(where + " is missing");
        }
        if (const auto* c = std::get_if<dist::Constant>(&*field)) {
            if (!(c->value >= 0.0 && c->value <= 1.0)) {
                throw BadStereotype(where + " is outside [0,1]");
            }
        }
        try {
            return clamp01(sample(stream, *field));
        } catch (const BadDistributionParams& e) {
            throw BadStereotype(where + ": " + e.what());
        }
    };

    Attributes attrs;
    for (auto c : kKnowledgeCategories) {
        attrs.knowledge_of(c) = level(stereotype.knowledge[static_cast<std::size_t>(c)],
                                      "knowledge." + std::string(to_string(c)));
    }
    attrs.communication = level(stereotype.communication, "communication");
    attrs.productivity = level(stereotype.productivity, "productivity");

    Traits traits;
    traits.willingness_to_support = level(stereotype.willingness_to_support, "willingness_to_support");
    traits.willingness_to_communicate = level(stereotype.willingness_to_communicate, "willingness_to_communicate");
    traits.base_productivity = level(stereotype.base_productivity, "base_productivity");

    return Agent(id, attrs, traits, StateChartInstance::start(std::move(chart), 0.0));
}

std::vector<Action> react(const Agent& agent, const Stimulus& stimulus, const RuleTable& rules,
                          const DiagnosticSink& log) {
    std::optional<std::vector<Action>> actions;
    if (rules) {
        actions = rules(agent, stimulus);
    }
    if (!actions) {
        if (log) {
            log("unhandled stimulus " + describe(stimulus) + " for " + agent.id().str() + " in state " +
                agent.state());
        }
        return {};
    }
    return std::move(*actions);
}

void apply_attribute_update(Attributes& attrs, const action::UpdateAttribute& update) {
    double& slot = attribute_ref(attrs, update.key);
    const double next = slot + update.delta;
    slot = std::isnan(next) ? slot : next;
    attrs.clamp();
}

std::string describe(const Stimulus& stimulus) {
    return std::visit(detail::overloaded{
                          [](const Message& m) { return "message:" + m.kind + " from " + m.from.str(); },
                          [](const TimeoutSignal& t) { return "timeout(epoch " + std::to_string(t.epoch) + ")"; },
                          [](const ScheduledSignal& s) { return "scheduled:" + s.kind; },
                      },
                      stimulus);
}

}  // namespace orgsim
