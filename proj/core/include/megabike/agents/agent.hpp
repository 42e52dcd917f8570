#pragma once

#include <cstdint>
#include <optional>
#include <span>

#include "megabike/rng.hpp"
#include "megabike/rules/entity.hpp"
#include "megabike/rules/rule.hpp"

namespace megabike::agents {

using AgentId = std::uint64_t;
using BikeId = std::uint64_t;

struct AgentParams {
  double max_energy = 100.0;
  double initial_energy = 100.0;
  double pedal_cost = 0.5;   // energy per unit pedal per round
  double rest_cost = 0.0;    // energy per round just for being alive
  double defect_probability = 0.0;
  double slack_threshold = 0.5;  // fraction of max_energy
  double slack_step = 0.05;
};

struct Agent {
  AgentId id = 0;
  double energy = 0.0;
  std::optional<BikeId> bike;
  double contribution = 0.0;  // cumulative pedal effort
  bool alive = true;

  rules::AgentView view(const AgentParams& params) const {
    return {id, energy, energy / params.max_energy, contribution};
  }
};

Agent make_agent(AgentId id, const AgentParams& params);

/// What the leader asks of every occupant this round.
struct MovementDirective {
  double intensity = 0.0;  // [0, 1]
  double heading = 0.0;    // radians
};

struct PedalAction {
  AgentId agent = 0;
  double pedal = 0.0;  // [0, 1]
  double brake = 0.0;  // [0, 1]; never both non-zero
  double steer_vote = 0.0;
};

struct Ballot {
  AgentId voter = 0;
  std::uint64_t choice = 0;
};

struct SlackProposal {
  std::size_t row = 0;
  double fraction = 0.0;
};

/// Compliant agents pedal the directed intensity; with probability
/// defect_probability the agent free-rides (pedal 0). Deducts
/// pedal_cost * pedal (floored at zero) and accumulates contribution.
/// Dead agents emit nothing. One uniform draw per living agent, always.
std::optional<PedalAction> decide_action(Agent& agent, const MovementDirective& directive,
                                         const AgentParams& params, Rng& rng);

/// Below slack_threshold * max_energy: loosen by +slack_step, otherwise
/// tighten by -slack_step. None for immutable rules or dead agents.
std::optional<SlackProposal> propose_slack(const Agent& agent, const rules::Rule& rule,
                                           std::size_t row, const AgentParams& params);

/// Votes for the lootbox with the best payoff / (distance + 1); the earlier
/// candidate wins exact ties. Errors: EmptyCandidates.
Ballot vote(const Agent& agent, std::span<const rules::LootboxView> candidates);

/// Uniformly random choice among opaque candidates. Errors: EmptyCandidates.
Ballot vote(const Agent& agent, std::span<const std::uint64_t> candidates, Rng& rng);

/// Per-round upkeep: subtracts rest_cost, floored at zero.
void metabolize(Agent& agent, const AgentParams& params);

/// Credits allocated loot, capped at max_energy.
void receive(Agent& agent, double amount, const AgentParams& params);

}  // namespace megabike::agents
