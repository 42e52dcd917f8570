#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "megabike/rules/action.hpp"
#include "megabike/rules/binding.hpp"
#include "megabike/rules/comparator.hpp"
#include "megabike/rules/entity.hpp"

namespace megabike::rules {

/// 128-bit identifier rendered in UUID v4 text form.
class RuleId {
 public:
  constexpr RuleId() = default;
  constexpr RuleId(std::uint64_t hi, std::uint64_t lo) : hi_(hi), lo_(lo) {}

  /// Process-unique, random-looking identifier with UUID v4 version/variant bits.
  static RuleId generate();
  /// Parses "xxxxxxxx-xxxx-xxxx-xxxx-xxxxxxxxxxxx" (hex, either case).
  static std::optional<RuleId> parse(std::string_view text);

  std::string to_string() const;
  constexpr std::uint64_t high() const noexcept { return hi_; }
  constexpr std::uint64_t low() const noexcept { return lo_; }

  friend constexpr bool operator==(const RuleId&, const RuleId&) = default;
  friend constexpr auto operator<=>(const RuleId&, const RuleId&) = default;

 private:
  std::uint64_t hi_ = 0;
  std::uint64_t lo_ = 0;
};

struct RuleIdHash {
  std::size_t operator()(const RuleId& id) const noexcept {
    return static_cast<std::size_t>(id.high() * 0x9e3779b97f4a7c15ULL ^ id.low());
  }
};

/// Dense row-major matrix of clause weights.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
  /// Throws Error(DimensionMismatch) on ragged input.
  static Matrix from_rows(const std::vector<std::vector<double>>& rows);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  double operator()(std::size_t r, std::size_t c) const noexcept { return data_[r * cols_ + c]; }
  double& operator()(std::size_t r, std::size_t c) noexcept { return data_[r * cols_ + c]; }
  std::span<const double> row(std::size_t r) const noexcept {
    return {data_.data() + r * cols_, cols_};
  }
  std::vector<std::vector<double>> to_rows() const;

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// A constraint M * inputs (cmp) 0, bound to one action kind.
///
/// Values are immutable after construction; mutation helpers return a new
/// Rule with the same identity. Invariants enforced by build_rule:
///   rows(M) == |comparators| >= 1, cols(M) == |inputs| >= 1,
///   the final input is the constant-1 binding.
class Rule {
 public:
  const RuleId& id() const noexcept { return id_; }
  const std::string& name() const noexcept { return name_; }
  bool is_mutable() const noexcept { return mutable_; }
  ActionKind action() const noexcept { return action_; }
  std::span<const InputBinding> inputs() const noexcept { return inputs_; }
  const Matrix& matrix() const noexcept { return matrix_; }
  std::span<const Comparator> comparators() const noexcept { return comparators_; }

  std::size_t clause_count() const noexcept { return matrix_.rows(); }
  std::size_t input_count() const noexcept { return matrix_.cols(); }
  /// Column index of the constant-1 input.
  std::size_t constant_column() const noexcept { return matrix_.cols() - 1; }

  /// Same rule with a different mutability flag (and same id).
  Rule with_mutability(bool is_mutable) const;

  friend bool operator==(const Rule&, const Rule&) = default;

 private:
  friend Rule build_rule(std::string, ActionKind, bool, std::vector<InputBinding>, Matrix,
                         std::vector<Comparator>, std::optional<RuleId>);
  friend Rule mutate_entry(const Rule&, std::size_t, std::size_t, double);

  Rule() = default;

  RuleId id_;
  std::string name_;
  bool mutable_ = false;
  ActionKind action_ = ActionKind::TargetSelection;
  std::vector<InputBinding> inputs_;
  Matrix matrix_;
  std::vector<Comparator> comparators_;
};

/// Validates and assembles a rule. A fresh id is generated unless one is given
/// (the loader passes the stored id through).
/// Errors: DimensionMismatch, MissingConstantColumn, InvalidValue (non-finite weight).
Rule build_rule(std::string name, ActionKind action, bool is_mutable,
                std::vector<InputBinding> inputs, Matrix matrix,
                std::vector<Comparator> comparators, std::optional<RuleId> id = std::nullopt);

/// The all-zeros single-clause EQ rule; passes for every entity.
Rule null_rule(ActionKind action, std::vector<InputBinding> inputs, std::string name = "null");

/// How undefined getters are treated during evaluation.
enum class EvalMode {
  /// Undefined getter is a stratification bug: throw Error(GetterUndefined).
  Strict,
  /// Clauses weighting an undefined input pass by default. Used when the whole
  /// cache is evaluated regardless of action.
  DefaultPass,
};

struct EvalResult {
  bool passed = true;
  /// One entry per clause evaluated; stops after the first failing clause.
  std::vector<bool> clause_results;
  /// Matrix entries read; at most clause_count * input_count.
  std::size_t entries_visited = 0;
};

EvalResult evaluate(const Rule& rule, const Entity& entity, EvalMode mode = EvalMode::Strict);

/// Evaluation on an already-resolved input vector (|values| == input_count).
EvalResult evaluate_inputs(const Rule& rule, std::span<const double> values);

/// Hot-path variant of evaluate() without per-clause reporting.
/// Adds the number of matrix entries read to *entries_visited when given.
bool passes(const Rule& rule, const Entity& entity, EvalMode mode,
            std::size_t* entries_visited = nullptr);

/// Resolves the rule's input vector for an entity (Strict semantics).
std::vector<double> resolve_inputs(const Rule& rule, const Entity& entity);

/// Replaces one matrix entry. Errors: ImmutableRule, IndexOutOfRange, InvalidValue.
Rule mutate_entry(const Rule& rule, std::size_t row, std::size_t col, double value);

/// Scales the constant-column entry of `row` by (1 + fraction). For a bound
/// written as `x - c <= 0` a positive fraction loosens it and a negative one
/// tightens it. Errors: ImmutableRule, IndexOutOfRange.
Rule apply_slack(const Rule& rule, std::size_t row, double fraction);

}  // namespace megabike::rules
