#include "megabike/rules/rule_cache.hpp"

#include "megabike/error.hpp"

namespace megabike::rules {

RuleCache::RuleCache(std::vector<Rule> rules) {
  for (auto& rule : rules) add(std::move(rule));
}

void RuleCache::add(Rule rule) {
  if (by_id_.contains(rule.id())) {
    throw Error(Errc::DuplicateRuleId, "rule id " + rule.id().to_string() + " already registered");
  }
  auto& bucket = by_action_[index_of(rule.action())];
  by_id_.emplace(rule.id(), Slot{rule.action(), bucket.size()});
  bucket.push_back(std::move(rule));
}

void RuleCache::replace(Rule rule) {
  auto it = by_id_.find(rule.id());
  if (it == by_id_.end()) {
    throw Error(Errc::IndexOutOfRange, "no rule with id " + rule.id().to_string());
  }
  if (it->second.action != rule.action()) {
    throw Error(Errc::InvalidValue, "replacement may not change a rule's action");
  }
  by_action_[index_of(it->second.action)][it->second.index] = std::move(rule);
}

bool RuleCache::remove(const RuleId& id) {
  auto it = by_id_.find(id);
  if (it == by_id_.end()) return false;
  const Slot slot = it->second;
  by_id_.erase(it);
  auto& bucket = by_action_[index_of(slot.action)];
  bucket.erase(bucket.begin() + static_cast<std::ptrdiff_t>(slot.index));
  for (std::size_t i = slot.index; i < bucket.size(); ++i) by_id_[bucket[i].id()].index = i;
  return true;
}

const Rule* RuleCache::find(const RuleId& id) const {
  auto it = by_id_.find(id);
  if (it == by_id_.end()) return nullptr;
  return &by_action_[index_of(it->second.action)][it->second.index];
}

std::vector<Rule> RuleCache::all() const {
  std::vector<Rule> out;
  out.reserve(size());
  for (const auto& bucket : by_action_) out.insert(out.end(), bucket.begin(), bucket.end());
  return out;
}

bool passes_all(std::span<const Rule> rules, const Entity& entity, EvalMode mode,
                EvalCounters* counters) {
  std::size_t visited = 0;
  std::uint64_t evaluated = 0;
  bool ok = true;
  for (const Rule& rule : rules) {
    ++evaluated;
    if (!passes(rule, entity, mode, &visited)) {
      ok = false;
      break;
    }
  }
  if (counters != nullptr) {
    counters->rules_evaluated += evaluated;
    counters->entries_visited += visited;
  }
  return ok;
}

std::vector<std::size_t> prune_indices(std::span<const Entity> candidates, const RuleCache& cache,
                                       ActionKind action, EvalCounters* counters) {
  const auto rules = cache.rules_for_action(action);
  std::vector<std::size_t> survivors;
  survivors.reserve(candidates.size());
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    if (passes_all(rules, candidates[i], EvalMode::Strict, counters)) survivors.push_back(i);
  }
  return survivors;
}

std::vector<std::size_t> prune_indices_unstratified(std::span<const Entity> candidates,
                                                    const RuleCache& cache,
                                                    EvalCounters* counters) {
  std::vector<std::size_t> survivors;
  survivors.reserve(candidates.size());
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    bool ok = true;
    for (ActionKind kind : kAllActionKinds) {
      if (!passes_all(cache.rules_for_action(kind), candidates[i], EvalMode::DefaultPass,
                      counters)) {
        ok = false;
        break;
      }
    }
    if (ok) survivors.push_back(i);
  }
  return survivors;
}

std::vector<Entity> prune(std::span<const Entity> candidates, const RuleCache& cache,
                          ActionKind action, EvalCounters* counters) {
  std::vector<Entity> out;
  for (std::size_t i : prune_indices(candidates, cache, action, counters)) {
    out.push_back(candidates[i]);
  }
  return out;
}

}  // namespace megabike::rules
