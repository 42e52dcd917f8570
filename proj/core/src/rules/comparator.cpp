#include "megabike/rules/action.hpp"
#include "megabike/rules/comparator.hpp"

namespace megabike::rules {

std::string_view to_string(ActionKind kind) noexcept {
  switch (kind) {
    case ActionKind::TargetSelection: return "TargetSelection";
    case ActionKind::Allocation: return "Allocation";
    case ActionKind::Election: return "Election";
    case ActionKind::Admission: return "Admission";
    case ActionKind::MovementDirective: return "MovementDirective";
  }
  return "Unknown";
}

std::optional<ActionKind> parse_action_kind(std::string_view text) noexcept {
  for (ActionKind kind : kAllActionKinds) {
    if (to_string(kind) == text) return kind;
  }
  return std::nullopt;
}

std::string_view to_token(Comparator cmp) noexcept {
  switch (cmp) {
    case Comparator::LT: return "<";
    case Comparator::GT: return ">";
    case Comparator::LEQ: return "<=";
    case Comparator::GEQ: return ">=";
    case Comparator::EQ: return "=";
  }
  return "?";
}

std::optional<Comparator> parse_comparator(std::string_view token) noexcept {
  if (token == "<") return Comparator::LT;
  if (token == ">") return Comparator::GT;
  if (token == "<=") return Comparator::LEQ;
  if (token == ">=") return Comparator::GEQ;
  if (token == "=" || token == "==") return Comparator::EQ;
  return std::nullopt;
}

}  // namespace megabike::rules
