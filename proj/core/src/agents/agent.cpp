#include "megabike/agents/agent.hpp"

#include <algorithm>

#include "megabike/error.hpp"

namespace megabike::agents {

Agent make_agent(AgentId id, const AgentParams& params) {
  Agent agent;
  agent.id = id;
  agent.energy = params.initial_energy;
  return agent;
}

std::optional<PedalAction> decide_action(Agent& agent, const MovementDirective& directive,
                                         const AgentParams& params, Rng& rng) {
  if (!agent.alive) return std::nullopt;
  const bool defects = rng.bernoulli(params.defect_probability);

  PedalAction action;
  action.agent = agent.id;
  action.steer_vote = directive.heading;
  action.pedal = defects ? 0.0 : std::clamp(directive.intensity, 0.0, 1.0);

  agent.energy = std::max(0.0, agent.energy - params.pedal_cost * action.pedal);
  agent.contribution += action.pedal;
  return action;
}

std::optional<SlackProposal> propose_slack(const Agent& agent, const rules::Rule& rule,
                                           std::size_t row, const AgentParams& params) {
  if (!agent.alive || !rule.is_mutable() || row >= rule.clause_count()) return std::nullopt;
  const bool hungry = agent.energy < params.slack_threshold * params.max_energy;
  return SlackProposal{row, hungry ? params.slack_step : -params.slack_step};
}

Ballot vote(const Agent& agent, std::span<const rules::LootboxView> candidates) {
  if (candidates.empty()) throw Error(Errc::EmptyCandidates, "nothing to vote for");
  const rules::LootboxView* best = &candidates.front();
  double best_score = best->payoff / (best->distance + 1.0);
  for (const auto& candidate : candidates.subspan(1)) {
    const double score = candidate.payoff / (candidate.distance + 1.0);
    if (score > best_score) {
      best = &candidate;
      best_score = score;
    }
  }
  return {agent.id, best->id};
}

Ballot vote(const Agent& agent, std::span<const std::uint64_t> candidates, Rng& rng) {
  if (candidates.empty()) throw Error(Errc::EmptyCandidates, "nothing to vote for");
  return {agent.id, candidates[rng.below(candidates.size())]};
}

void metabolize(Agent& agent, const AgentParams& params) {
  if (!agent.alive) return;
  agent.energy = std::max(0.0, agent.energy - params.rest_cost);
}

void receive(Agent& agent, double amount, const AgentParams& params) {
  agent.energy = std::min(params.max_energy, agent.energy + amount);
}

}  // namespace megabike::agents
