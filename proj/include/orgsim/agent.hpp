#pragma once

#include "orgsim/agent_id.hpp"
#include "orgsim/engine.hpp"
#include "orgsim/rng.hpp"
#include "orgsim/statechart.hpp"

#include <array>
#include <deque>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace orgsim {

enum class KnowledgeCategory : std::uint8_t { Planning = 0, Design = 1, Testing = 2 };

inline constexpr std::array<KnowledgeCategory, 3> kKnowledgeCategories{
    KnowledgeCategory::Planning, KnowledgeCategory::Design, KnowledgeCategory::Testing};

std::string_view to_string(KnowledgeCategory c) noexcept;
std::optional<KnowledgeCategory> parse_category(std::string_view name) noexcept;

/// Evolving levels, each kept in [0, 1].
struct Attributes {
    std::array<double, 3> knowledge{};
    double communication = 0.0;
    double productivity = 0.0;

    double& knowledge_of(KnowledgeCategory c) { return knowledge[static_cast<std::size_t>(c)]; }
    double knowledge_of(KnowledgeCategory c) const { return knowledge[static_cast<std::size_t>(c)]; }

    void clamp();
    /// Mean of the five levels.
    double mean_level() const;
    bool operator==(const Attributes&) const = default;
};

/// Stereotype parameters fixed at initialisation.
struct Traits {
    double willingness_to_support = 0.0;
    double willingness_to_communicate = 0.0;
    double base_productivity = 0.0;

    bool operator==(const Traits&) const = default;
};

/// Start-up values or distributions for every attribute and trait.
struct Stereotype {
    std::string name;
    std::array<std::optional<Distribution>, 3> knowledge;
    std::optional<Distribution> communication;
    std::optional<Distribution> productivity;
    std::optional<Distribution> willingness_to_support;
    std::optional<Distribution> willingness_to_communicate;
    std::optional<Distribution> base_productivity;
};

enum class AttributeKey : std::uint8_t {
    KnowledgePlanning,
    KnowledgeDesign,
    KnowledgeTesting,
    Communication,
    Productivity,
};

inline constexpr std::array<AttributeKey, 5> kAttributeKeys{
    AttributeKey::KnowledgePlanning, AttributeKey::KnowledgeDesign, AttributeKey::KnowledgeTesting,
    AttributeKey::Communication, AttributeKey::Productivity};

std::string_view to_string(AttributeKey key) noexcept;
AttributeKey knowledge_key(KnowledgeCategory c) noexcept;
double attribute_value(const Attributes& attrs, AttributeKey key) noexcept;

/// What an agent reacts to: a delivered message, the timeout of its current
/// state, or a scheduled signal.
using Stimulus = EventPayload;

class Agent {
public:
    Agent(AgentId id, Attributes attributes, Traits traits, StateChartInstance chart)
        : id_(id), attributes_(attributes), traits_(traits), chart_(std::move(chart)) {}

    const AgentId& id() const noexcept { return id_; }
    Attributes& attributes() noexcept { return attributes_; }
    const Attributes& attributes() const noexcept { return attributes_; }
    const Traits& traits() const noexcept { return traits_; }
    StateChartInstance& chart() noexcept { return chart_; }
    const StateChartInstance& chart() const noexcept { return chart_; }
    const std::string& state() const noexcept { return chart_.current; }
    bool is_idle() const noexcept { return chart_.current == chart_.chart->idle_id; }

    /// Bumped on every state change; timeouts carry the epoch they were
    /// scheduled under.
    std::uint64_t epoch() const noexcept { return epoch_; }
    void bump_epoch() noexcept { ++epoch_; }

    /// Stimuli whose trigger was deferred, oldest first.
    std::deque<Stimulus>& deferred() noexcept { return deferred_; }
    const std::deque<Stimulus>& deferred() const noexcept { return deferred_; }

private:
    AgentId id_;
    Attributes attributes_;
    Traits traits_;
    StateChartInstance chart_;
    std::deque<Stimulus> deferred_;
    std::uint64_t epoch_ = 0;
};

/// Samples or copies every stereotype field, clamps to [0, 1] and starts
/// the chart in idle at t = 0. Draws come from the stream "init:<agent>".
/// Throws BadStereotype for a missing or out-of-range field.
Agent init_agent_from_stereotype(const AgentId& id, const Stereotype& stereotype,
                                 std::shared_ptr<const StateChartDef> chart, RngStreams& streams);

namespace action {
/// `trigger` indexes the agent's chart triggers; `subject` is scenario data
/// (an activity or session reference) attached to the transition.
struct FireTrigger {
    std::size_t trigger = 0;
    std::int64_t subject = -1;
    bool operator==(const FireTrigger&) const = default;
};
struct SendMessage {
    AgentId to;
    std::string kind;
    MessageData data;
    bool operator==(const SendMessage& o) const {
        return to == o.to && kind == o.kind && data.subject == o.data.subject &&
               data.related == o.data.related && data.value == o.data.value;
    }
};
/// A scheduled signal addressed to the reacting agent itself.
struct ScheduleEvent {
    SimTime delay = 0.0;
    std::string kind;
    std::int64_t arg = 0;
    bool operator==(const ScheduleEvent&) const = default;
};
struct UpdateAttribute {
    AttributeKey key;
    double delta = 0.0;
    bool operator==(const UpdateAttribute&) const = default;
};
}  // namespace action

using Action = std::variant<action::FireTrigger, action::SendMessage, action::ScheduleEvent, action::UpdateAttribute>;

/// A role's rules. Returns nullopt for a stimulus the role does not handle.
using RuleTable = std::function<std::optional<std::vector<Action>>(const Agent&, const Stimulus&)>;

using DiagnosticSink = std::function<void(std::string_view)>;

/// Runs the stimulus through the rule table. An unhandled stimulus is
/// reported to `log` and yields no actions.
std::vector<Action> react(const Agent& agent, const Stimulus& stimulus, const RuleTable& rules,
                          const DiagnosticSink& log = {});

/// Adds the delta and clamps every level back into [0, 1].
void apply_attribute_update(Attributes& attrs, const action::UpdateAttribute& update);

std::string describe(const Stimulus& stimulus);

}  // namespace orgsim
