#include "megabike/sim/game_loop.hpp"

#include <algorithm>
#include <chrono>
#include <limits>

#include "megabike/error.hpp"

namespace megabike::sim {

namespace {

using Clock = std::chrono::steady_clock;
using agents::Agent;
using agents::AgentId;
using governance::Megabike;
using rules::ActionKind;

constexpr std::uint64_t kNone = std::numeric_limits<std::uint64_t>::max();

std::uint64_t nanos_since(Clock::time_point start) {
  return static_cast<std::uint64_t>(
      std::chrono::duration_cast<std::chrono::nanoseconds>(Clock::now() - start).count());
}

// Bound implied by one clause of a slack rule: the value of its first input at
// which the clause is tight, or the negated constant if that input has no weight.
double clause_bound(const rules::Rule& rule, std::size_t row) {
  const double constant = rule.matrix()(row, rule.constant_column());
  const double lead = rule.input_count() > 1 ? rule.matrix()(row, 0) : 0.0;
  return lead != 0.0 ? -constant / lead : -constant;
}

class Game {
 public:
  explicit Game(const SimConfig& config) : config_(config), master_(config.seed) {}

  RunMetrics run();

 private:
  void run_iteration(std::size_t iteration);
  void play_round(std::size_t round);
  void elect(Megabike& bike, Rng& rng);
  double radius_of(const Megabike& bike) const;

  void phase(Phase p, std::uint64_t bike = 0) {
    if (config_.record_trace) metrics_.phases.push_back({iteration_, round_, bike, p});
  }
  void decide(DecisionKind kind, std::uint64_t bike, std::uint64_t subject, double value) {
    if (config_.record_trace) {
      metrics_.decisions.push_back({iteration_, round_, bike, kind, subject, value});
    }
  }
  void kill(Agent& agent) {
    agent.alive = false;
    death_round_[agent.id] = round_;
    decide(DecisionKind::Death, agent.bike.value_or(kNone), agent.id, agent.energy);
  }

  const SimConfig& config_;
  Rng master_;
  rules::RuleCache base_;
  std::optional<rules::RuleId> slack_id_;

  std::vector<Agent> agents_;
  std::vector<world::Lootbox> lootboxes_;
  std::vector<Megabike> bikes_;
  std::vector<world::ThreatState> threats_;  // one per bike, or a single shared one
  std::vector<std::size_t> death_round_;
  Rng agent_rng_{0};

  std::size_t iteration_ = 0;
  std::size_t round_ = 0;
  std::size_t stalled_rounds_ = 0;
  bool deadlocked_ = false;

  RunMetrics metrics_;
};

RunMetrics Game::run() {
  validate(config_);
  for (auto& rule : resolve_base_rules(config_)) {
    if (rule.name() == config_.slack_rule && !slack_id_) slack_id_ = rule.id();
    base_.add(std::move(rule));
  }

  phase(Phase::Initialization);
  agents_.reserve(config_.agent_count);
  for (std::size_t i = 0; i < config_.agent_count; ++i) {
    agents_.push_back(agents::make_agent(i, config_.agent));
  }

  double survival_sum = 0.0;
  std::size_t survival_count = 0;
  std::uint64_t runtime_total = 0;
  std::size_t executed = 0;

  for (std::size_t it = 1; it <= config_.max_iterations && !deadlocked_; ++it) {
    iteration_ = it;
    const auto before = Clock::now();
    run_iteration(it);
    runtime_total += nanos_since(before);
    ++executed;

    for (std::size_t r : death_round_) {
      survival_sum += static_cast<double>(r == 0 ? round_ : r);
      ++survival_count;
    }
  }

  auto& s = metrics_.summary;
  s.iterations = executed;
  s.rounds_per_iteration = config_.max_rounds;
  s.deadlocked = deadlocked_;
  s.avg_survival_rounds = survival_count ? survival_sum / static_cast<double>(survival_count) : 0;
  s.runtime_per_iteration_nanos =
      executed ? static_cast<double>(runtime_total) / static_cast<double>(executed) : 0.0;
  for (const auto& rec : metrics_.rounds) {
    s.total_loot += rec.loot_acquired;
    s.rules_evaluated += rec.rules_evaluated;
  }
  for (const auto& bike : bikes_) s.final_radius_bound = std::max(s.final_radius_bound, radius_of(bike));
  return std::move(metrics_);
}

void Game::run_iteration(std::size_t iteration) {
  Rng world_rng = master_.substream("world", iteration);
  Rng membership_rng = master_.substream("membership", iteration);
  agent_rng_ = master_.substream("agents", iteration);
  const auto& wp = config_.world;

  for (auto& agent : agents_) {
    agent.energy = config_.agent.initial_energy;
    agent.alive = true;
    agent.bike.reset();
  }
  death_round_.assign(agents_.size(), 0);
  lootboxes_ = world::spawn_lootboxes(config_.lootbox_ratio, agents_.size(), wp, world_rng);
  round_ = 0;
  stalled_rounds_ = 0;

  phase(Phase::Membership);
  bikes_ = governance::form_bikes(agents_, config_.seats, base_, config_.allocation,
                                  membership_rng);
  const double half = wp.bike_spawn_side / 2.0;
  for (auto& bike : bikes_) {
    if (half > 0.0) {
      bike.position.x = world_rng.uniform(-half, half);
      bike.position.y = world_rng.uniform(-half, half);
    }
    bike.heading = 0.0;
  }
  threats_.clear();
  for (const auto& bike : bikes_) {
    threats_.push_back({world::spawn_behind(bike.position, bike.heading, wp.threat_spawn_gap),
                        wp.threat_speed});
    if (!wp.threat_per_bike) break;
  }

  // Every bike adopts the base contract afresh; form_bikes handed each a copy.
  for (const auto& bike : bikes_) phase(Phase::SocialArrangement, bike.id);

  for (auto& bike : bikes_) {
    phase(Phase::RoleAssignment, bike.id);
    elect(bike, agent_rng_);
  }

  for (std::size_t r = 1; r <= config_.max_rounds; ++r) {
    const bool any_live = std::any_of(bikes_.begin(), bikes_.end(),
                                      [](const Megabike& b) { return !b.terminated; });
    if (!any_live) break;
    round_ = r;
    play_round(r);
  }
}

void Game::elect(Megabike& bike, Rng& rng) {
  governance::RuleEvaluation eval{config_.stratified, nullptr};
  const auto leader = governance::run_election(bike, agents_, config_.agent, eval, rng);
  decide(DecisionKind::Leader, bike.id, leader.value_or(kNone), 0.0);
}

double Game::radius_of(const Megabike& bike) const {
  if (!slack_id_) return 0.0;
  const auto* rule = bike.ruleset.find(*slack_id_);
  if (rule == nullptr || config_.slack_row >= rule->clause_count()) return 0.0;
  return clause_bound(*rule, config_.slack_row);
}

void Game::play_round(std::size_t round) {
  const auto start = Clock::now();
  const auto& wp = config_.world;
  const auto& ap = config_.agent;
  const std::size_t n = bikes_.size();

  std::vector<std::size_t> live;
  for (std::size_t b = 0; b < n; ++b) {
    if (!bikes_[b].terminated) live.push_back(b);
  }
  std::vector<rules::EvalCounters> counters(n);
  std::vector<agents::MovementDirective> directives(n);
  std::vector<bool> has_target(n, false);
  std::vector<bool> moved(n, false);
  std::vector<double> loot(n, 0.0);
  const auto eval_for = [&](std::size_t b) {
    return governance::RuleEvaluation{config_.stratified, &counters[b]};
  };

  for (std::size_t b : live) {
    auto& bike = bikes_[b];
    phase(Phase::TargetDecision, bike.id);
    const auto eval = eval_for(b);
    const auto decision = governance::select_target(bike, lootboxes_, agents_, eval);
    const std::size_t crew = governance::living_occupants(bike, agents_);

    double target_distance = 0.0;
    auto& directive = directives[b];
    directive.heading = bike.heading;
    if (decision.lootbox) {
      const auto& box = lootboxes_[*decision.lootbox];
      has_target[b] = true;
      target_distance = world::distance(bike.position, box.position);
      directive.heading = world::bearing(bike.position, box.position);
      // Pedal just hard enough to arrive, never past the target.
      const double full = wp.force_to_displacement * static_cast<double>(crew);
      directive.intensity = full > 0.0 ? std::min(1.0, target_distance / full) : 0.0;
    }
    decide(DecisionKind::Target, bike.id, decision.lootbox ? lootboxes_[*decision.lootbox].id : kNone,
           static_cast<double>(decision.candidates));

    const auto& threat = threats_[wp.threat_per_bike ? b : 0];
    const rules::Entity self = rules::BikeView{
        bike.id, static_cast<double>(crew), static_cast<double>(bike.free_seats()),
        world::distance(bike.position, threat.position), target_distance};
    const bool allowed = !eval.survivors(bike.ruleset, ActionKind::MovementDirective,
                                         std::span(&self, 1))
                              .empty();
    if (!allowed || !bike.leader) directive.intensity = 0.0;
  }

  std::vector<std::vector<agents::PedalAction>> actions(n);
  for (std::size_t b : live) {
    phase(Phase::AgentActions, bikes_[b].id);
    for (AgentId id : bikes_[b].occupants) {
      if (auto act = agents::decide_action(agents_[id], directives[b], ap, agent_rng_)) {
        actions[b].push_back(*act);
      }
    }
  }

  for (std::size_t b : live) {
    auto& bike = bikes_[b];
    phase(Phase::ApplyEffects, bike.id);
    bike.heading = directives[b].heading;
    const auto next =
        world::step_kinematics({bike.position, bike.heading}, actions[b], wp.force_to_displacement);
    moved[b] = next != bike.position;
    bike.position = next;
  }
  for (auto& agent : agents_) agents::metabolize(agent, ap);

  std::vector<std::uint64_t> captured;
  if (wp.threat_per_bike) {
    for (std::size_t b : live) {
      const world::BikeLocation loc{bikes_[b].id, bikes_[b].position};
      auto adv = world::advance_threat(threats_[b], std::span(&loc, 1), wp.capture_radius);
      threats_[b] = adv.threat;
      captured.insert(captured.end(), adv.terminated.begin(), adv.terminated.end());
    }
  } else if (!threats_.empty()) {
    std::vector<world::BikeLocation> locs;
    for (std::size_t b : live) locs.push_back({bikes_[b].id, bikes_[b].position});
    auto adv = world::advance_threat(threats_.front(), locs, wp.capture_radius);
    threats_.front() = adv.threat;
    captured = std::move(adv.terminated);
  }
  for (std::uint64_t id : captured) {
    auto& bike = bikes_[id];
    bike.terminated = true;
    for (AgentId a : bike.occupants) {
      if (agents_[a].alive) kill(agents_[a]);
    }
  }

  for (std::size_t b : live) {
    auto& bike = bikes_[b];
    if (bike.terminated) continue;
    phase(Phase::Allocation, bike.id);
    for (auto& box : lootboxes_) {
      if (box.consumed || world::distance(bike.position, box.position) > wp.acquisition_radius) {
        continue;
      }
      const double payoff = box.payoff;
      const auto shares = governance::allocate_loot(bike, box, agents_, ap, eval_for(b));
      for (const auto& [id, amount] : shares) {
        agents::receive(agents_[id], amount, ap);
        decide(DecisionKind::Allocation, bike.id, id, amount);
      }
      loot[b] += payoff;
    }
  }
  for (auto& agent : agents_) {
    if (agent.alive && agent.energy <= 0.0) kill(agent);
  }

  if (slack_id_) {
    for (std::size_t b : live) {
      auto& bike = bikes_[b];
      if (bike.terminated) continue;
      const auto* rule = bike.ruleset.find(*slack_id_);
      if (rule == nullptr || !rule->is_mutable()) continue;
      std::vector<governance::MutationProposal> proposals;
      for (AgentId id : bike.occupants) {
        if (auto p = agents::propose_slack(agents_[id], *rule, config_.slack_row, ap)) {
          proposals.push_back({id, *slack_id_, p->row, p->fraction});
        }
      }
      if (governance::resolve_mutations(bike, proposals, agents_).enacted > 0) {
        decide(DecisionKind::Mutation, bike.id, config_.slack_row, radius_of(bike));
      }
    }
  }

  std::vector<std::vector<AgentId>> seated_before(n);
  for (std::size_t b : live) {
    auto& bike = bikes_[b];
    phase(Phase::AdmissionExclusion, bike.id);
    seated_before[b] = bike.occupants;
    for (AgentId id : governance::apply_exclusions(bike, {}, agents_)) {
      decide(DecisionKind::Exclusion, bike.id, id, 0.0);
    }
  }
  std::vector<rules::EvalCounters> admission(1);
  governance::RuleEvaluation admit_eval{config_.stratified, &admission.front()};
  governance::admit_unseated(bikes_, agents_, ap, admit_eval);
  for (std::size_t b = 0; b < n; ++b) {
    auto& bike = bikes_[b];
    for (AgentId id : bike.occupants) {
      if (std::find(seated_before[b].begin(), seated_before[b].end(), id) ==
          seated_before[b].end()) {
        decide(DecisionKind::Admission, bike.id, id, 0.0);
      }
    }
    // A crew that lost its leader chooses a new one before the next round.
    if (!bike.terminated && !bike.leader && governance::living_occupants(bike, agents_) > 0) {
      elect(bike, agent_rng_);
    }
  }
  // Admission work is not tied to one bike; charge it to the first live one.
  if (!live.empty()) counters[live.front()] += admission.front();

  bool stalled = true;
  for (std::size_t b : live) stalled = stalled && !has_target[b] && !moved[b];
  stalled_rounds_ = stalled ? stalled_rounds_ + 1 : 0;
  if (stalled_rounds_ >= config_.deadlock_rounds) deadlocked_ = true;

  const std::uint64_t elapsed = nanos_since(start);
  for (std::size_t b : live) {
    const auto& bike = bikes_[b];
    RoundRecord rec;
    rec.iteration = iteration_;
    rec.round = round;
    rec.bike_id = bike.id;
    for (AgentId id : bike.occupants) {
      if (!agents_[id].alive) continue;
      ++rec.alive_agents;
      rec.energy_total += agents_[id].energy;
    }
    rec.loot_acquired = loot[b];
    rec.radius_bound = radius_of(bike);
    rec.rules_evaluated = counters[b].rules_evaluated;
    rec.wall_clock_nanos = elapsed;
    metrics_.rounds.push_back(rec);
  }
}

}  // namespace

std::string_view to_string(Phase phase) noexcept {
  switch (phase) {
    case Phase::Initialization: return "initialization";
    case Phase::Membership: return "membership";
    case Phase::SocialArrangement: return "social-arrangement";
    case Phase::RoleAssignment: return "role-assignment";
    case Phase::TargetDecision: return "target-decision";
    case Phase::AgentActions: return "agent-actions";
    case Phase::ApplyEffects: return "apply-effects";
    case Phase::Allocation: return "allocation";
    case Phase::AdmissionExclusion: return "admission-exclusion";
  }
  return "?";
}

bool is_operation_phase(Phase phase) noexcept {
  return phase >= Phase::TargetDecision;
}

std::string_view to_string(DecisionKind kind) noexcept {
  switch (kind) {
    case DecisionKind::Leader: return "leader";
    case DecisionKind::Target: return "target";
    case DecisionKind::Allocation: return "allocation";
    case DecisionKind::Mutation: return "mutation";
    case DecisionKind::Exclusion: return "exclusion";
    case DecisionKind::Admission: return "admission";
    case DecisionKind::Death: return "death";
  }
  return "?";
}

RunMetrics run_game(const SimConfig& config) { return Game(config).run(); }

std::uint64_t count_deliberation_avoided(std::uint64_t iterations, std::uint64_t rounds,
                                         std::uint64_t kinds) {
  return iterations * rounds * kinds - iterations;
}

std::uint64_t count_deliberation_avoided(const RunMetrics& metrics) {
  return count_deliberation_avoided(metrics.summary.iterations,
                                    metrics.summary.rounds_per_iteration);
}

}  // namespace megabike::sim
