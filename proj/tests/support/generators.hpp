#pragma once

// Hand-rolled generators and a brute-force oracle shared by the property and
// acceptance tests. The oracle never touches the engine's evaluation code: it
// reads raw feature values and applies the inequality definition directly.

#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "megabike/rules/binding.hpp"
#include "megabike/rules/rule.hpp"

namespace megabike::testing {

struct RawRule {
  std::vector<std::vector<double>> rows;  // last column is the constant
  std::vector<std::string> comparators;   // "<", ">", "<=", ">=", "="
  std::vector<std::size_t> features;      // feature index per non-constant column
};

inline bool oracle_compare(double v, const std::string& cmp) {
  if (cmp == "<") return v < 0;
  if (cmp == ">") return v > 0;
  if (cmp == "<=") return v <= 0;
  if (cmp == ">=") return v >= 0;
  return std::fabs(v) <= 1e-9;
}

/// Conjunction over clauses of (sum_c w_c * x_c + w_const) cmp 0.
inline bool oracle_passes(const RawRule& rule, const std::vector<double>& features) {
  for (std::size_t r = 0; r < rule.rows.size(); ++r) {
    const auto& row = rule.rows[r];
    double v = 0.0;
    for (std::size_t c = 0; c + 1 < row.size(); ++c) v += row[c] * features[rule.features[c]];
    v += row.back() * 1.0;
    if (!oracle_compare(v, rule.comparators[r])) return false;
  }
  return true;
}

class Gen {
 public:
  explicit Gen(std::uint64_t seed) : engine_(seed) {}

  std::size_t size(std::size_t lo, std::size_t hi) {
    return std::uniform_int_distribution<std::size_t>(lo, hi)(engine_);
  }
  double real(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(engine_); }
  bool coin(double p = 0.5) { return std::bernoulli_distribution(p)(engine_); }

  /// Mostly small integers (so EQ and boundary cases actually occur), sometimes reals.
  double weight() {
    if (coin(0.2)) return 0.0;
    if (coin(0.6)) return static_cast<double>(static_cast<int>(size(0, 10)) - 5);
    return real(-10.0, 10.0);
  }
  double feature_value() {
    if (coin(0.5)) return static_cast<double>(static_cast<int>(size(0, 20)) - 10);
    return real(-100.0, 100.0);
  }

  std::string comparator() {
    static const char* tokens[] = {"<", ">", "<=", ">=", "="};
    return tokens[size(0, 4)];
  }

  RawRule raw_rule(std::size_t feature_count = 16) {
    RawRule rule;
    const std::size_t clauses = size(1, 4);
    const std::size_t vars = size(0, 4);
    for (std::size_t v = 0; v < vars; ++v) rule.features.push_back(size(0, feature_count - 1));
    for (std::size_t r = 0; r < clauses; ++r) {
      auto& row = rule.rows.emplace_back();
      for (std::size_t c = 0; c <= vars; ++c) row.push_back(weight());
      rule.comparators.push_back(comparator());
    }
    return rule;
  }

  std::vector<double> features(std::size_t n = 16) {
    std::vector<double> out(n);
    for (auto& v : out) v = feature_value();
    return out;
  }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

inline rules::Rule to_rule(const RawRule& raw, rules::ActionKind action = rules::ActionKind::TargetSelection,
                           bool is_mutable = true, std::string name = "generated") {
  std::vector<rules::InputBinding> inputs;
  for (std::size_t f : raw.features) inputs.push_back(rules::binding("f" + std::to_string(f)));
  inputs.push_back(rules::InputBinding::constant());
  std::vector<rules::Comparator> cmps;
  for (const auto& token : raw.comparators) cmps.push_back(*rules::parse_comparator(token));
  return rules::build_rule(std::move(name), action, is_mutable, std::move(inputs),
                           rules::Matrix::from_rows(raw.rows), std::move(cmps));
}

}  // namespace megabike::testing
