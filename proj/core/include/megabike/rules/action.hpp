#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string_view>

namespace megabike::rules {

/// The decision a rule constrains. Rules are stratified on this value.
enum class ActionKind : std::size_t {
  TargetSelection = 0,
  Allocation = 1,
  Election = 2,
  Admission = 3,
  MovementDirective = 4,
};

inline constexpr std::size_t kActionKindCount = 5;

inline constexpr std::array<ActionKind, kActionKindCount> kAllActionKinds = {
    ActionKind::TargetSelection, ActionKind::Allocation, ActionKind::Election,
    ActionKind::Admission,       ActionKind::MovementDirective,
};

constexpr std::size_t index_of(ActionKind kind) noexcept { return static_cast<std::size_t>(kind); }

std::string_view to_string(ActionKind kind) noexcept;
std::optional<ActionKind> parse_action_kind(std::string_view text) noexcept;

}  // namespace megabike::rules
