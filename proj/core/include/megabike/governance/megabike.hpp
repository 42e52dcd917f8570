#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "megabike/agents/agent.hpp"
#include "megabike/rng.hpp"
#include "megabike/rules/rule_cache.hpp"
#include "megabike/world/world.hpp"

namespace megabike::governance {

using agents::AgentId;
using agents::BikeId;

enum class AllocationPolicy { Equal, Contribution };

std::string_view to_string(AllocationPolicy policy) noexcept;
std::optional<AllocationPolicy> parse_allocation_policy(std::string_view text) noexcept;

/// A vehicle and the institution bound to it. The ruleset is the bike's own
/// copy of the contract; all governed decisions consult it.
struct Megabike {
  BikeId id = 0;
  std::size_t seats = 0;
  std::vector<AgentId> occupants;
  std::optional<AgentId> leader;
  world::GridPosition position;
  double heading = 0.0;
  rules::RuleCache ruleset;
  AllocationPolicy allocation = AllocationPolicy::Equal;
  bool terminated = false;

  std::size_t free_seats() const noexcept {
    return occupants.size() >= seats ? 0 : seats - occupants.size();
  }
};

struct MutationProposal {
  AgentId proposer = 0;
  rules::RuleId rule;
  std::size_t row = 0;
  double fraction = 0.0;
};

/// How governed decisions consult the ruleset. Stratified evaluation reads only
/// the decision's action bucket; unstratified evaluation runs every rule with
/// default-pass semantics for inapplicable bindings.
struct RuleEvaluation {
  bool stratified = true;
  rules::EvalCounters* counters = nullptr;

  std::vector<std::size_t> survivors(const rules::RuleCache& cache, rules::ActionKind action,
                                     std::span<const rules::Entity> candidates) const;
};

/// Agents are addressed by id; the table must satisfy agents[i].id == i.
using AgentTable = std::span<agents::Agent>;
using ConstAgentTable = std::span<const agents::Agent>;

/// Seeded shuffle of the living agents, chunked into ceil(n / seats) bikes.
/// Every bike gets its own copy of `base`. Sets each agent's bike.
std::vector<Megabike> form_bikes(AgentTable agents, std::size_t seats,
                                 const rules::RuleCache& base, AllocationPolicy allocation,
                                 Rng& rng);

/// Plurality over ballots cast by occupants for occupants; ties go to the
/// lowest id. With no valid ballot the lowest-id occupant wins.
/// Errors: NoOccupants.
AgentId elect_leader(Megabike& bike, std::span<const agents::Ballot> ballots);

/// Role assignment: Election rules prune the occupants; every living occupant
/// casts a random ballot among the eligible. No eligible candidate leaves the
/// bike without a leader.
std::optional<AgentId> run_election(Megabike& bike, ConstAgentTable agents,
                                    const agents::AgentParams& params,
                                    const RuleEvaluation& eval, Rng& rng);

struct TargetDecision {
  std::optional<std::size_t> lootbox;  // index into the lootbox list
  std::size_t candidates = 0;          // survivors of pruning
  std::size_t ballots_cast = 0;
};

/// Prunes unconsumed lootboxes with the TargetSelection rules. A single
/// survivor is taken without a vote; several go to a plurality vote of the
/// living occupants (ties: nearer, then lower id); none holds heading.
TargetDecision select_target(const Megabike& bike, std::span<const world::Lootbox> lootboxes,
                             ConstAgentTable agents, const RuleEvaluation& eval);

/// Splits a lootbox among the living occupants that pass the Allocation rules
/// (all living occupants if none pass), by the bike's policy. The shares sum to
/// the payoff exactly. Marks the lootbox consumed.
/// Errors: AlreadyConsumed.
std::map<AgentId, double> allocate_loot(const Megabike& bike, world::Lootbox& lootbox,
                                        ConstAgentTable agents, const agents::AgentParams& params,
                                        const RuleEvaluation& eval);

/// Exact-sum split of `amount` by non-negative weights (equal if all zero).
std::map<AgentId, double> split_exact(double amount, std::span<const AgentId> recipients,
                                      std::span<const double> weights);

struct MutationOutcome {
  std::size_t enacted = 0;
  std::size_t dropped = 0;
};

/// Groups proposals by (rule, row, fraction). A group backed by a strict
/// majority of living occupants is enacted once with apply_slack; at most one
/// enactment per rule per call. Proposals on unknown or immutable rules, or
/// from non-occupants, are dropped.
MutationOutcome resolve_mutations(Megabike& bike, std::span<const MutationProposal> proposals,
                                  ConstAgentTable agents);

std::size_t living_occupants(const Megabike& bike, ConstAgentTable agents);

/// Removes dead occupants, then any occupant named by a strict majority of the
/// living occupants' exclusion ballots. Returns the excluded (not dead) ids.
std::vector<AgentId> apply_exclusions(Megabike& bike, std::span<const agents::Ballot> votes,
                                      AgentTable agents);

/// Seats unseated living agents, lowest id first, into bikes with free seats in
/// bike id order, subject to each bike's Admission rules.
std::size_t admit_unseated(std::span<Megabike> bikes, AgentTable agents,
                           const agents::AgentParams& params, const RuleEvaluation& eval);

/// Exclusion on bikes[index] followed by admission across all bikes.
void exclusion_and_admission(std::span<Megabike> bikes, std::size_t index,
                             std::span<const agents::Ballot> votes, AgentTable agents,
                             const agents::AgentParams& params, const RuleEvaluation& eval);

}  // namespace megabike::governance
