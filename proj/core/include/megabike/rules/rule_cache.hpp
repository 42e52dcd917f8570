#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <unordered_map>
#include <vector>

#include "megabike/rules/action.hpp"
#include "megabike/rules/rule.hpp"

namespace megabike::rules {

/// Action-stratified rule registry.
///
/// Each rule lives in exactly one action bucket, kept in registration order,
/// and is indexed by id. Copying a cache deep-copies the contract, so two
/// bikes holding copies diverge independently. Const access is safe from
/// concurrent readers; add/replace/remove need exclusive access.
class RuleCache {
 public:
  RuleCache() = default;
  explicit RuleCache(std::vector<Rule> rules);

  /// Errors: DuplicateRuleId.
  void add(Rule rule);
  /// Swaps in a new value for an existing id; the action must not change.
  /// Errors: IndexOutOfRange (unknown id), InvalidValue (action changed).
  void replace(Rule rule);
  bool remove(const RuleId& id);

  /// The bucket for `action`, in registration order. O(1).
  std::span<const Rule> rules_for_action(ActionKind action) const noexcept {
    return by_action_[index_of(action)];
  }
  const Rule* find(const RuleId& id) const;

  /// Every rule, bucket by bucket in ActionKind order.
  std::vector<Rule> all() const;
  std::size_t size() const noexcept { return by_id_.size(); }
  bool empty() const noexcept { return by_id_.empty(); }

 private:
  struct Slot {
    ActionKind action;
    std::size_t index;
  };

  std::array<std::vector<Rule>, kActionKindCount> by_action_;
  std::unordered_map<RuleId, Slot, RuleIdHash> by_id_;
};

inline std::span<const Rule> rules_for_action(const RuleCache& cache, ActionKind action) noexcept {
  return cache.rules_for_action(action);
}

struct EvalCounters {
  std::uint64_t rules_evaluated = 0;
  std::uint64_t entries_visited = 0;

  EvalCounters& operator+=(const EvalCounters& other) noexcept {
    rules_evaluated += other.rules_evaluated;
    entries_visited += other.entries_visited;
    return *this;
  }
};

/// True when every rule in `rules` passes; stops at the first failure.
bool passes_all(std::span<const Rule> rules, const Entity& entity, EvalMode mode,
                EvalCounters* counters = nullptr);

/// Indices of candidates that pass every rule bound to `action`, in input order.
/// Strict mode: a binding that does not apply to a candidate throws GetterUndefined.
std::vector<std::size_t> prune_indices(std::span<const Entity> candidates, const RuleCache& cache,
                                       ActionKind action, EvalCounters* counters = nullptr);

/// Same outcome computed without stratification: every rule in the cache is
/// evaluated against every candidate, and inapplicable clauses pass by default.
std::vector<std::size_t> prune_indices_unstratified(std::span<const Entity> candidates,
                                                    const RuleCache& cache,
                                                    EvalCounters* counters = nullptr);

std::vector<Entity> prune(std::span<const Entity> candidates, const RuleCache& cache,
                          ActionKind action, EvalCounters* counters = nullptr);

}  // namespace megabike::rules
