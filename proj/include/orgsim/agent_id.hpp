#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace orgsim {

enum class Role : std::uint8_t { Manager, Supervisor, Designer };

std::string_view to_string(Role role) noexcept;

/// `index` is unique across the whole model and doubles as the tie-break
/// order ("lowest agent index"). The manager carries no team.
struct AgentId {
    Role role = Role::Designer;
    std::optional<int> team;
    int index = 0;

    static AgentId manager(int index = 0) { return {Role::Manager, std::nullopt, index}; }
    static AgentId supervisor(int team, int index) { return {Role::Supervisor, team, index}; }
    static AgentId designer(int team, int index) { return {Role::Designer, team, index}; }

    friend bool operator==(const AgentId& a, const AgentId& b) { return a.index == b.index; }
    friend std::strong_ordering operator<=>(const AgentId& a, const AgentId& b) { return a.index <=> b.index; }

    /// e.g. "M0", "S1/t0", "D4/t1".
    std::string str() const;
};

}  // namespace orgsim
