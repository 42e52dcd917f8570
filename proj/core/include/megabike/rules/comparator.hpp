#pragma once

#include <optional>
#include <string_view>

namespace megabike::rules {

/// Absolute tolerance for EQ clauses, so the null rule's 0 == 0 survives rounding.
inline constexpr double kEqTolerance = 1e-9;

enum class Comparator { LT, GT, LEQ, GEQ, EQ };

/// Compares a clause value against zero.
constexpr bool holds(double value, Comparator cmp) noexcept {
  switch (cmp) {
    case Comparator::LT: return value < 0.0;
    case Comparator::GT: return value > 0.0;
    case Comparator::LEQ: return value <= 0.0;
    case Comparator::GEQ: return value >= 0.0;
    case Comparator::EQ: return (value < 0.0 ? -value : value) <= kEqTolerance;
  }
  return false;
}

/// "<", ">", "<=", ">=", "="
std::string_view to_token(Comparator cmp) noexcept;
std::optional<Comparator> parse_comparator(std::string_view token) noexcept;

}  // namespace megabike::rules
