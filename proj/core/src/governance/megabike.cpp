#include "megabike/governance/megabike.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <tuple>

#include <fmt/format.h>

#include "megabike/error.hpp"

namespace megabike::governance {

namespace {

using rules::ActionKind;
using rules::Entity;

bool is_living(ConstAgentTable agents, AgentId id) {
  return id < agents.size() && agents[id].alive;
}

std::vector<AgentId> living_occupant_ids(const Megabike& bike, ConstAgentTable agents) {
  std::vector<AgentId> out;
  out.reserve(bike.occupants.size());
  for (AgentId id : bike.occupants) {
    if (is_living(agents, id)) out.push_back(id);
  }
  return out;
}

}  // namespace

std::string_view to_string(AllocationPolicy policy) noexcept {
  return policy == AllocationPolicy::Equal ? "equal" : "contribution";
}

std::optional<AllocationPolicy> parse_allocation_policy(std::string_view text) noexcept {
  if (text == "equal") return AllocationPolicy::Equal;
  if (text == "contribution") return AllocationPolicy::Contribution;
  return std::nullopt;
}

std::vector<std::size_t> RuleEvaluation::survivors(const rules::RuleCache& cache,
                                                   ActionKind action,
                                                   std::span<const Entity> candidates) const {
  return stratified ? rules::prune_indices(candidates, cache, action, counters)
                    : rules::prune_indices_unstratified(candidates, cache, counters);
}

std::vector<Megabike> form_bikes(AgentTable agents, std::size_t seats,
                                 const rules::RuleCache& base, AllocationPolicy allocation,
                                 Rng& rng) {
  if (seats == 0) throw Error(Errc::ConfigInvalid, "a megabike needs at least one seat");

  std::vector<AgentId> pool;
  for (auto& agent : agents) {
    agent.bike.reset();
    if (agent.alive) pool.push_back(agent.id);
  }
  rng.shuffle(std::span<AgentId>(pool));

  std::vector<Megabike> bikes;
  bikes.reserve((pool.size() + seats - 1) / seats);
  for (std::size_t start = 0; start < pool.size(); start += seats) {
    Megabike bike;
    bike.id = bikes.size();
    bike.seats = seats;
    bike.ruleset = base;
    bike.allocation = allocation;
    const std::size_t end = std::min(pool.size(), start + seats);
    bike.occupants.assign(pool.begin() + static_cast<std::ptrdiff_t>(start),
                          pool.begin() + static_cast<std::ptrdiff_t>(end));
    for (AgentId id : bike.occupants) agents[id].bike = bike.id;
    bikes.push_back(std::move(bike));
  }
  return bikes;
}

AgentId elect_leader(Megabike& bike, std::span<const agents::Ballot> ballots) {
  if (bike.occupants.empty()) {
    throw Error(Errc::NoOccupants, fmt::format("bike {} has nobody to elect", bike.id));
  }
  const auto seated = [&](AgentId id) {
    return std::find(bike.occupants.begin(), bike.occupants.end(), id) != bike.occupants.end();
  };

  std::map<AgentId, std::size_t> tally;
  for (const auto& ballot : ballots) {
    if (seated(ballot.voter) && seated(ballot.choice)) ++tally[ballot.choice];
  }

  AgentId winner = *std::min_element(bike.occupants.begin(), bike.occupants.end());
  std::size_t best = 0;
  // std::map iterates ascending, so a strict > keeps the lowest id on ties.
  for (const auto& [candidate, votes] : tally) {
    if (votes > best) {
      best = votes;
      winner = candidate;
    }
  }
  bike.leader = winner;
  return winner;
}

std::optional<AgentId> run_election(Megabike& bike, ConstAgentTable agents,
                                    const agents::AgentParams& params,
                                    const RuleEvaluation& eval, Rng& rng) {
  bike.leader.reset();
  const auto living = living_occupant_ids(bike, agents);
  if (living.empty()) return std::nullopt;

  std::vector<Entity> views;
  views.reserve(living.size());
  for (AgentId id : living) views.emplace_back(agents[id].view(params));

  std::vector<std::uint64_t> eligible;
  for (std::size_t i : eval.survivors(bike.ruleset, ActionKind::Election, views)) {
    eligible.push_back(living[i]);
  }
  if (eligible.empty()) return std::nullopt;

  std::vector<agents::Ballot> ballots;
  ballots.reserve(living.size());
  for (AgentId voter : living) ballots.push_back(agents::vote(agents[voter], eligible, rng));
  return elect_leader(bike, ballots);
}

TargetDecision select_target(const Megabike& bike, std::span<const world::Lootbox> lootboxes,
                             ConstAgentTable agents, const RuleEvaluation& eval) {
  TargetDecision decision;

  std::vector<std::size_t> index;
  std::vector<Entity> candidates;
  for (std::size_t i = 0; i < lootboxes.size(); ++i) {
    const auto& box = lootboxes[i];
    if (box.consumed) continue;
    index.push_back(i);
    candidates.emplace_back(
        rules::LootboxView{box.id, world::distance(bike.position, box.position), box.payoff});
  }
  if (candidates.empty()) return decision;

  const auto kept = eval.survivors(bike.ruleset, ActionKind::TargetSelection, candidates);
  decision.candidates = kept.size();
  if (kept.empty()) return decision;
  if (kept.size() == 1) {
    decision.lootbox = index[kept.front()];
    return decision;
  }

  std::vector<rules::LootboxView> views;
  views.reserve(kept.size());
  for (std::size_t k : kept) views.push_back(std::get<rules::LootboxView>(candidates[k]));

  std::map<std::uint64_t, std::size_t> tally;
  for (AgentId voter : living_occupant_ids(bike, agents)) {
    ++tally[agents::vote(agents[voter], views).choice];
    ++decision.ballots_cast;
  }
  if (tally.empty()) return decision;

  // Most votes, then nearest, then lowest id.
  const rules::LootboxView* best = nullptr;
  std::size_t best_votes = 0;
  for (const auto& view : views) {
    const auto it = tally.find(view.id);
    const std::size_t votes = it == tally.end() ? 0 : it->second;
    if (best == nullptr ||
        std::tuple(votes, -view.distance) > std::tuple(best_votes, -best->distance) ||
        (votes == best_votes && view.distance == best->distance && view.id < best->id)) {
      best = &view;
      best_votes = votes;
    }
  }
  for (std::size_t i = 0; i < views.size(); ++i) {
    if (&views[i] == best) decision.lootbox = index[kept[i]];
  }
  return decision;
}

std::map<AgentId, double> split_exact(double amount, std::span<const AgentId> recipients,
                                      std::span<const double> weights) {
  std::map<AgentId, double> shares;
  if (recipients.empty()) return shares;

  double total_weight = 0.0;
  for (double w : weights) total_weight += w;
  const bool equal = !(total_weight > 0.0);

  std::vector<AgentId> order(recipients.begin(), recipients.end());
  std::vector<double> w(weights.begin(), weights.end());
  if (equal) w.assign(order.size(), 1.0);
  std::vector<std::size_t> perm(order.size());
  std::iota(perm.begin(), perm.end(), 0);
  std::sort(perm.begin(), perm.end(), [&](auto a, auto b) { return order[a] < order[b]; });
  if (equal) total_weight = static_cast<double>(order.size());

  // All but the last recipient (in id order) get their proportional share
  // floored to the spacing of doubles at `amount`. Every partial sum is then a
  // multiple of that spacing below 2x the amount's binade, hence exact, and the
  // last recipient's remainder closes the sum exactly.
  const double quantum = amount > 0.0 ? std::nextafter(amount, HUGE_VAL) - amount : 0.0;
  std::vector<double> head;
  double assigned = 0.0;
  for (std::size_t k = 0; k + 1 < perm.size(); ++k) {
    const double share = amount * (w[perm[k]] / total_weight);
    head.push_back(quantum > 0.0 ? std::floor(share / quantum) * quantum : 0.0);
    assigned += head.back();
  }
  while (assigned > amount) {
    auto& big = *std::max_element(head.begin(), head.end());
    big -= quantum;
    assigned -= quantum;
  }
  const double last = amount - assigned;
  for (std::size_t k = 0; k + 1 < perm.size(); ++k) shares[order[perm[k]]] = head[k];
  shares[order[perm.back()]] = last;
  return shares;
}

std::map<AgentId, double> allocate_loot(const Megabike& bike, world::Lootbox& lootbox,
                                        ConstAgentTable agents, const agents::AgentParams& params,
                                        const RuleEvaluation& eval) {
  if (lootbox.consumed) {
    throw Error(Errc::AlreadyConsumed, fmt::format("lootbox {} was already consumed", lootbox.id));
  }
  lootbox.consumed = true;

  const auto living = living_occupant_ids(bike, agents);
  if (living.empty()) return {};

  std::vector<Entity> views;
  views.reserve(living.size());
  for (AgentId id : living) views.emplace_back(agents[id].view(params));
  std::vector<AgentId> recipients;
  for (std::size_t i : eval.survivors(bike.ruleset, ActionKind::Allocation, views)) {
    recipients.push_back(living[i]);
  }
  if (recipients.empty()) recipients = living;

  std::vector<double> weights(recipients.size(), 1.0);
  if (bike.allocation == AllocationPolicy::Contribution) {
    for (std::size_t i = 0; i < recipients.size(); ++i) {
      weights[i] = agents[recipients[i]].contribution;
    }
  }
  return split_exact(lootbox.payoff, recipients, weights);
}

std::size_t living_occupants(const Megabike& bike, ConstAgentTable agents) {
  return living_occupant_ids(bike, agents).size();
}

MutationOutcome resolve_mutations(Megabike& bike, std::span<const MutationProposal> proposals,
                                  ConstAgentTable agents) {
  MutationOutcome outcome;
  const auto living = living_occupant_ids(bike, agents);

  using Key = std::tuple<rules::RuleId, std::size_t, double>;
  std::map<Key, std::size_t> groups;
  std::vector<AgentId> seen;
  for (const auto& p : proposals) {
    const bool occupant = std::find(living.begin(), living.end(), p.proposer) != living.end();
    const bool repeat = std::find(seen.begin(), seen.end(), p.proposer) != seen.end();
    const auto* rule = bike.ruleset.find(p.rule);
    if (!occupant || repeat || rule == nullptr || !rule->is_mutable() ||
        p.row >= rule->clause_count()) {
      ++outcome.dropped;
      continue;
    }
    seen.push_back(p.proposer);
    ++groups[Key{p.rule, p.row, p.fraction}];
  }

  // Compute every replacement first so the cache changes in one step.
  std::vector<rules::Rule> updates;
  std::vector<rules::RuleId> touched;
  for (const auto& [key, count] : groups) {
    const auto& [rule_id, row, fraction] = key;
    if (2 * count <= living.size()) {
      outcome.dropped += count;
      continue;
    }
    if (std::find(touched.begin(), touched.end(), rule_id) != touched.end()) continue;
    touched.push_back(rule_id);
    updates.push_back(rules::apply_slack(*bike.ruleset.find(rule_id), row, fraction));
  }
  for (auto& rule : updates) bike.ruleset.replace(std::move(rule));
  outcome.enacted = updates.size();
  return outcome;
}

std::vector<AgentId> apply_exclusions(Megabike& bike, std::span<const agents::Ballot> votes,
                                      AgentTable agents) {
  std::vector<AgentId> excluded;
  const auto living = living_occupant_ids(bike, agents);

  std::map<AgentId, std::size_t> tally;
  std::vector<AgentId> voted;
  for (const auto& ballot : votes) {
    const bool voter_ok = std::find(living.begin(), living.end(), ballot.voter) != living.end();
    const bool repeat = std::find(voted.begin(), voted.end(), ballot.voter) != voted.end();
    if (!voter_ok || repeat) continue;
    voted.push_back(ballot.voter);
    ++tally[ballot.choice];
  }

  std::vector<AgentId> keep;
  for (AgentId id : bike.occupants) {
    const bool dead = !is_living(agents, id);
    const auto it = tally.find(id);
    const bool voted_out = !dead && it != tally.end() && 2 * it->second > living.size();
    if (dead || voted_out) {
      if (id < agents.size()) agents[id].bike.reset();
      if (voted_out) excluded.push_back(id);
      continue;
    }
    keep.push_back(id);
  }
  bike.occupants = std::move(keep);
  if (bike.leader && std::find(bike.occupants.begin(), bike.occupants.end(), *bike.leader) ==
                         bike.occupants.end()) {
    bike.leader.reset();
  }
  if (bike.occupants.empty()) bike.terminated = true;
  return excluded;
}

std::size_t admit_unseated(std::span<Megabike> bikes, AgentTable agents,
                           const agents::AgentParams& params, const RuleEvaluation& eval) {
  std::vector<AgentId> waiting;
  for (const auto& agent : agents) {
    if (agent.alive && !agent.bike) waiting.push_back(agent.id);
  }
  std::size_t admitted = 0;
  for (auto& bike : bikes) {
    if (waiting.empty()) break;
    if (bike.terminated || bike.free_seats() == 0) continue;

    std::vector<Entity> views;
    views.reserve(waiting.size());
    for (AgentId id : waiting) views.emplace_back(agents[id].view(params));
    const auto eligible = eval.survivors(bike.ruleset, ActionKind::Admission, views);

    std::vector<AgentId> seated_now;
    for (std::size_t i : eligible) {
      if (bike.free_seats() == 0) break;
      const AgentId id = waiting[i];
      bike.occupants.push_back(id);
      agents[id].bike = bike.id;
      seated_now.push_back(id);
      ++admitted;
    }
    std::erase_if(waiting, [&](AgentId id) {
      return std::find(seated_now.begin(), seated_now.end(), id) != seated_now.end();
    });
  }
  return admitted;
}

void exclusion_and_admission(std::span<Megabike> bikes, std::size_t index,
                             std::span<const agents::Ballot> votes, AgentTable agents,
                             const agents::AgentParams& params, const RuleEvaluation& eval) {
  apply_exclusions(bikes[index], votes, agents);
  admit_unseated(bikes, agents, params, eval);
}

}  // namespace megabike::governance
