#include "megabike/rules/stacking.hpp"

#include <fmt/format.h>

#include "megabike/error.hpp"

namespace megabike::rules {

SparseMatrix::SparseMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), row_start_(rows + 1, 0) {}

void SparseMatrix::push(std::size_t row, std::size_t col, double value) {
  if (row >= rows_ || col >= cols_) {
    throw Error(Errc::IndexOutOfRange, fmt::format("entry ({}, {}) outside {}x{} sparse matrix",
                                                   row, col, rows_, cols_));
  }
  // Rows after `row` must still be empty.
  if (row_start_[rows_] != row_start_[row + 1]) {
    throw Error(Errc::InvalidValue, "sparse entries must be appended in row order");
  }
  if (value == 0.0) return;
  entries_.push_back({col, value});
  for (std::size_t r = row + 1; r <= rows_; ++r) row_start_[r] = entries_.size();
}

double SparseMatrix::at(std::size_t r, std::size_t c) const noexcept {
  for (const auto& entry : row(r)) {
    if (entry.col == c) return entry.value;
  }
  return 0.0;
}

Matrix SparseMatrix::to_dense() const {
  Matrix dense(rows_, cols_);
  for (std::size_t r = 0; r < rows_; ++r) {
    for (const auto& entry : row(r)) dense(r, entry.col) = entry.value;
  }
  return dense;
}

StackedRuleSystem stack(std::span<const Rule> rules) {
  if (rules.empty()) throw Error(Errc::EmptyRuleList, "cannot stack an empty rule list");

  std::size_t total_rows = 0;
  std::size_t total_cols = 1;  // shared constant column
  for (const Rule& rule : rules) {
    total_rows += rule.clause_count();
    total_cols += rule.input_count() - 1;
  }

  StackedRuleSystem sys;
  sys.matrix = SparseMatrix(total_rows, total_cols);
  sys.rule_count = rules.size();
  sys.inputs.reserve(total_cols);
  sys.column_source.reserve(total_cols);
  sys.comparators.reserve(total_rows);
  sys.source_rule_ids.reserve(total_rows);
  sys.row_source.reserve(total_rows);

  const std::size_t shared = total_cols - 1;
  std::size_t row_offset = 0;
  std::size_t col_offset = 0;
  for (std::size_t i = 0; i < rules.size(); ++i) {
    const Rule& rule = rules[i];
    const std::size_t own = rule.input_count() - 1;
    for (std::size_t c = 0; c < own; ++c) {
      sys.inputs.push_back(rule.inputs()[c]);
      sys.column_source.push_back(i);
    }
    for (std::size_t r = 0; r < rule.clause_count(); ++r) {
      const auto weights = rule.matrix().row(r);
      for (std::size_t c = 0; c < own; ++c) sys.matrix.push(row_offset + r, col_offset + c, weights[c]);
      sys.matrix.push(row_offset + r, shared, weights[own]);
      sys.comparators.push_back(rule.comparators()[r]);
      sys.source_rule_ids.push_back(rule.id());
      sys.row_source.push_back(i);
    }
    row_offset += rule.clause_count();
    col_offset += own;
  }
  sys.inputs.push_back(InputBinding::constant());
  sys.column_source.push_back(StackedRuleSystem::kSharedColumn);
  return sys;
}

std::vector<double> joint_inputs(const StackedRuleSystem& sys, std::span<const Entity> entities) {
  if (entities.size() != sys.rule_count) {
    throw Error(Errc::DimensionMismatch, fmt::format("stacked system has {} rules but {} "
                                                     "entities were given",
                                                     sys.rule_count, entities.size()));
  }
  std::vector<double> joint(sys.inputs.size());
  for (std::size_t c = 0; c < sys.inputs.size(); ++c) {
    const std::size_t source = sys.column_source[c];
    if (source == StackedRuleSystem::kSharedColumn) {
      joint[c] = 1.0;
      continue;
    }
    auto value = sys.inputs[c].read(entities[source]);
    if (!value) {
      throw Error(Errc::GetterUndefined,
                  fmt::format("binding '{}' does not apply to entity {}", sys.inputs[c].name(),
                              source));
    }
    joint[c] = *value;
  }
  return joint;
}

std::vector<bool> evaluate_stacked_clauses(const StackedRuleSystem& sys,
                                           std::span<const double> joint) {
  if (joint.size() != sys.matrix.cols()) {
    throw Error(Errc::DimensionMismatch, fmt::format("joint vector has {} entries, expected {}",
                                                     joint.size(), sys.matrix.cols()));
  }
  std::vector<bool> results(sys.matrix.rows());
  for (std::size_t r = 0; r < sys.matrix.rows(); ++r) {
    double sum = 0.0;
    for (const auto& entry : sys.matrix.row(r)) sum += entry.value * joint[entry.col];
    results[r] = holds(sum, sys.comparators[r]);
  }
  return results;
}

bool evaluate_stacked(const StackedRuleSystem& sys, std::span<const double> joint) {
  if (joint.size() != sys.matrix.cols()) {
    throw Error(Errc::DimensionMismatch, fmt::format("joint vector has {} entries, expected {}",
                                                     joint.size(), sys.matrix.cols()));
  }
  for (std::size_t r = 0; r < sys.matrix.rows(); ++r) {
    double sum = 0.0;
    for (const auto& entry : sys.matrix.row(r)) sum += entry.value * joint[entry.col];
    if (!holds(sum, sys.comparators[r])) return false;
  }
  return true;
}

bool evaluate_stacked(const StackedRuleSystem& sys, std::span<const Entity> entities) {
  const auto joint = joint_inputs(sys, entities);
  return evaluate_stacked(sys, std::span<const double>(joint));
}

}  // namespace megabike::rules
