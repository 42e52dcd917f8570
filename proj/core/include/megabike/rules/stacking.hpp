#pragma once

#include <cstddef>
#include <limits>
#include <span>
#include <vector>

#include "megabike/rules/rule.hpp"

namespace megabike::rules {

/// Compressed sparse row matrix.
class SparseMatrix {
 public:
  struct Entry {
    std::size_t col;
    double value;
  };

  SparseMatrix() = default;
  SparseMatrix(std::size_t rows, std::size_t cols);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t nonzeros() const noexcept { return entries_.size(); }

  /// Entries must be appended row by row; zeros are dropped.
  void push(std::size_t row, std::size_t col, double value);
  std::span<const Entry> row(std::size_t r) const noexcept {
    return {entries_.data() + row_start_[r], row_start_[r + 1] - row_start_[r]};
  }
  double at(std::size_t r, std::size_t c) const noexcept;
  Matrix to_dense() const;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<std::size_t> row_start_;  // rows_ + 1 offsets
  std::vector<Entry> entries_;
};

/// Block-diagonal combination of several rules into one constraint system.
///
/// Rule i's non-constant inputs occupy their own column block, in rule order;
/// all constant terms share the last column. Inputs are never merged across
/// rules even when they carry the same binding.
struct StackedRuleSystem {
  static constexpr std::size_t kSharedColumn = std::numeric_limits<std::size_t>::max();

  SparseMatrix matrix;
  std::vector<InputBinding> inputs;
  std::vector<Comparator> comparators;
  std::vector<RuleId> source_rule_ids;     // per row
  std::vector<std::size_t> row_source;     // per row: index into the stacked rule list
  std::vector<std::size_t> column_source;  // per column: rule index, or kSharedColumn
  std::size_t rule_count = 0;
};

/// Errors: EmptyRuleList.
StackedRuleSystem stack(std::span<const Rule> rules);

/// Joint input vector: each rule's inputs read from its own entity, constant 1 last.
/// |entities| must equal sys.rule_count. Errors: DimensionMismatch, GetterUndefined.
std::vector<double> joint_inputs(const StackedRuleSystem& sys, std::span<const Entity> entities);

/// Per-clause evaluation of the whole system on a joint input vector.
std::vector<bool> evaluate_stacked_clauses(const StackedRuleSystem& sys,
                                           std::span<const double> joint);

bool evaluate_stacked(const StackedRuleSystem& sys, std::span<const double> joint);
bool evaluate_stacked(const StackedRuleSystem& sys, std::span<const Entity> entities);

}  // namespace megabike::rules
