#include "megabike/rules/rule.hpp"

#include <array>
#include <atomic>
#include <cmath>
#include <random>

#include <fmt/format.h>

#include "megabike/error.hpp"

namespace megabike::rules {

namespace {

std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t process_salt() {
  static const std::uint64_t salt = [] {
    std::random_device device;
    return (static_cast<std::uint64_t>(device()) << 32) ^ device();
  }();
  return salt;
}

int hex_value(char c) noexcept {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

// Small inline buffer for the resolved input vector; rules rarely exceed a
// handful of inputs.
class InputBuffer {
 public:
  explicit InputBuffer(std::size_t n) : size_(n) {
    if (n > inline_.size()) heap_.resize(n);
  }
  double* data() noexcept { return heap_.empty() ? inline_.data() : heap_.data(); }
  std::span<const double> view() noexcept { return {data(), size_}; }

 private:
  std::array<double, 16> inline_{};
  std::vector<double> heap_;
  std::size_t size_;
};

// Resolves inputs into `out`. In DefaultPass mode an inapplicable getter reads
// as 0 and its column is flagged in `undefined` (bit per column, first 64).
void resolve_into(const Rule& rule, const Entity& entity, EvalMode mode, double* out,
                  std::uint64_t& undefined) {
  const auto inputs = rule.inputs();
  for (std::size_t c = 0; c < inputs.size(); ++c) {
    if (auto value = inputs[c].read(entity)) {
      out[c] = *value;
      continue;
    }
    if (mode == EvalMode::Strict) {
      throw Error(Errc::GetterUndefined, fmt::format("binding '{}' of rule '{}' does not apply to "
                                                     "this entity",
                                                     inputs[c].name(), rule.name()));
    }
    out[c] = 0.0;
    undefined |= (c < 64 ? (std::uint64_t{1} << c) : ~std::uint64_t{0});
  }
}

bool row_touches_undefined(std::span<const double> row, std::uint64_t undefined) noexcept {
  if (undefined == 0) return false;
  for (std::size_t c = 0; c < row.size(); ++c) {
    const bool flagged = c < 64 ? ((undefined >> c) & 1U) != 0 : undefined == ~std::uint64_t{0};
    if (flagged && row[c] != 0.0) return true;
  }
  return false;
}

double dot(std::span<const double> row, const double* values) noexcept {
  double sum = 0.0;
  for (std::size_t c = 0; c < row.size(); ++c) sum += row[c] * values[c];
  return sum;
}

void require_mutable(const Rule& rule) {
  if (!rule.is_mutable()) {
    throw Error(Errc::ImmutableRule, fmt::format("rule '{}' is not mutable", rule.name()));
  }
}

}  // namespace

RuleId RuleId::generate() {
  static std::atomic<std::uint64_t> counter{0};
  const std::uint64_t n = counter.fetch_add(1, std::memory_order_relaxed);
  std::uint64_t hi = splitmix64(process_salt() ^ splitmix64(n));
  std::uint64_t lo = splitmix64(hi ^ n);
  hi = (hi & 0xffffffffffff0fffULL) | 0x0000000000004000ULL;  // version 4
  lo = (lo & 0x3fffffffffffffffULL) | 0x8000000000000000ULL;  // RFC 4122 variant
  return RuleId(hi, lo);
}

std::optional<RuleId> RuleId::parse(std::string_view text) {
  if (text.size() != 36) return std::nullopt;
  std::uint64_t words[2] = {0, 0};
  int nibbles = 0;
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (i == 8 || i == 13 || i == 18 || i == 23) {
      if (text[i] != '-') return std::nullopt;
      continue;
    }
    const int v = hex_value(text[i]);
    if (v < 0) return std::nullopt;
    auto& word = words[nibbles / 16];
    word = (word << 4) | static_cast<std::uint64_t>(v);
    ++nibbles;
  }
  return RuleId(words[0], words[1]);
}

std::string RuleId::to_string() const {
  return fmt::format("{:08x}-{:04x}-{:04x}-{:04x}-{:012x}", hi_ >> 32, (hi_ >> 16) & 0xffff,
                     hi_ & 0xffff, lo_ >> 48, lo_ & 0xffffffffffffULL);
}

Matrix Matrix::from_rows(const std::vector<std::vector<double>>& rows) {
  if (rows.empty()) return Matrix();
  const std::size_t cols = rows.front().size();
  Matrix m(rows.size(), cols);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != cols) {
      throw Error(Errc::DimensionMismatch,
                  fmt::format("row {} has {} entries, expected {}", r, rows[r].size(), cols));
    }
    for (std::size_t c = 0; c < cols; ++c) m(r, c) = rows[r][c];
  }
  return m;
}

std::vector<std::vector<double>> Matrix::to_rows() const {
  std::vector<std::vector<double>> out(rows_);
  for (std::size_t r = 0; r < rows_; ++r) {
    auto values = row(r);
    out[r].assign(values.begin(), values.end());
  }
  return out;
}

Rule Rule::with_mutability(bool is_mutable) const {
  Rule copy = *this;
  copy.mutable_ = is_mutable;
  return copy;
}

Rule build_rule(std::string name, ActionKind action, bool is_mutable,
                std::vector<InputBinding> inputs, Matrix matrix, std::vector<Comparator> comparators,
                std::optional<RuleId> id) {
  if (matrix.rows() == 0 || matrix.cols() == 0) {
    throw Error(Errc::DimensionMismatch, fmt::format("rule '{}' has an empty matrix", name));
  }
  if (matrix.rows() != comparators.size()) {
    throw Error(Errc::DimensionMismatch,
                fmt::format("rule '{}': {} clauses but {} comparators", name, matrix.rows(),
                            comparators.size()));
  }
  if (matrix.cols() != inputs.size()) {
    throw Error(Errc::DimensionMismatch,
                fmt::format("rule '{}': {} columns but {} inputs", name, matrix.cols(),
                            inputs.size()));
  }
  if (!inputs.back().is_constant()) {
    throw Error(Errc::MissingConstantColumn,
                fmt::format("rule '{}': last input must be the constant 1", name));
  }
  for (std::size_t r = 0; r < matrix.rows(); ++r) {
    for (double w : matrix.row(r)) {
      if (!std::isfinite(w)) {
        throw Error(Errc::InvalidValue, fmt::format("rule '{}' has a non-finite weight", name));
      }
    }
  }

  Rule rule;
  rule.id_ = id.value_or(RuleId::generate());
  rule.name_ = std::move(name);
  rule.mutable_ = is_mutable;
  rule.action_ = action;
  rule.inputs_ = std::move(inputs);
  rule.matrix_ = std::move(matrix);
  rule.comparators_ = std::move(comparators);
  return rule;
}

Rule null_rule(ActionKind action, std::vector<InputBinding> inputs, std::string name) {
  Matrix zeros(1, inputs.size(), 0.0);
  return build_rule(std::move(name), action, false, std::move(inputs), std::move(zeros),
                    {Comparator::EQ});
}

EvalResult evaluate_inputs(const Rule& rule, std::span<const double> values) {
  if (values.size() != rule.input_count()) {
    throw Error(Errc::DimensionMismatch, fmt::format("rule '{}' expects {} inputs, got {}",
                                                     rule.name(), rule.input_count(),
                                                     values.size()));
  }
  EvalResult result;
  result.clause_results.reserve(rule.clause_count());
  const auto cmps = rule.comparators();
  for (std::size_t r = 0; r < rule.clause_count(); ++r) {
    const auto row = rule.matrix().row(r);
    result.entries_visited += row.size();
    const bool ok = holds(dot(row, values.data()), cmps[r]);
    result.clause_results.push_back(ok);
    if (!ok) {
      result.passed = false;
      break;
    }
  }
  return result;
}

EvalResult evaluate(const Rule& rule, const Entity& entity, EvalMode mode) {
  InputBuffer buffer(rule.input_count());
  std::uint64_t undefined = 0;
  resolve_into(rule, entity, mode, buffer.data(), undefined);

  EvalResult result;
  result.clause_results.reserve(rule.clause_count());
  const auto cmps = rule.comparators();
  for (std::size_t r = 0; r < rule.clause_count(); ++r) {
    const auto row = rule.matrix().row(r);
    result.entries_visited += row.size();
    const double value = dot(row, buffer.data());
    const bool ok = row_touches_undefined(row, undefined) || holds(value, cmps[r]);
    result.clause_results.push_back(ok);
    if (!ok) {
      result.passed = false;
      break;
    }
  }
  return result;
}

bool passes(const Rule& rule, const Entity& entity, EvalMode mode, std::size_t* entries_visited) {
  InputBuffer buffer(rule.input_count());
  std::uint64_t undefined = 0;
  resolve_into(rule, entity, mode, buffer.data(), undefined);

  const auto cmps = rule.comparators();
  std::size_t visited = 0;
  bool ok = true;
  for (std::size_t r = 0; r < rule.clause_count() && ok; ++r) {
    const auto row = rule.matrix().row(r);
    visited += row.size();
    const double value = dot(row, buffer.data());
    ok = row_touches_undefined(row, undefined) || holds(value, cmps[r]);
  }
  if (entries_visited != nullptr) *entries_visited += visited;
  return ok;
}

std::vector<double> resolve_inputs(const Rule& rule, const Entity& entity) {
  std::vector<double> values(rule.input_count());
  std::uint64_t undefined = 0;
  resolve_into(rule, entity, EvalMode::Strict, values.data(), undefined);
  return values;
}

Rule mutate_entry(const Rule& rule, std::size_t row, std::size_t col, double value) {
  require_mutable(rule);
  if (row >= rule.clause_count() || col >= rule.input_count()) {
    throw Error(Errc::IndexOutOfRange,
                fmt::format("entry ({}, {}) outside {}x{} matrix of rule '{}'", row, col,
                            rule.clause_count(), rule.input_count(), rule.name()));
  }
  if (!std::isfinite(value)) {
    throw Error(Errc::InvalidValue, "matrix entries must be finite");
  }
  Rule copy = rule;
  copy.matrix_(row, col) = value;
  return copy;
}

Rule apply_slack(const Rule& rule, std::size_t row, double fraction) {
  require_mutable(rule);
  if (row >= rule.clause_count()) {
    throw Error(Errc::IndexOutOfRange,
                fmt::format("row {} outside rule '{}' with {} clauses", row, rule.name(),
                            rule.clause_count()));
  }
  if (fraction == 0.0) return rule;
  const std::size_t col = rule.constant_column();
  return mutate_entry(rule, row, col, rule.matrix()(row, col) * (1.0 + fraction));
}

}  // namespace megabike::rules
