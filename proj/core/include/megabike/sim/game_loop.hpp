#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include "megabike/sim/config.hpp"

namespace megabike::sim {

struct RoundRecord {
  std::size_t iteration = 0;  // 1-based
  std::size_t round = 0;      // 1-based
  std::uint64_t bike_id = 0;
  std::size_t alive_agents = 0;  // living occupants after the round
  double energy_total = 0.0;     // summed over those occupants
  double loot_acquired = 0.0;
  double radius_bound = 0.0;  // 0 when the bike has no slack rule
  std::uint64_t rules_evaluated = 0;
  std::uint64_t wall_clock_nanos = 0;  // this bike's turn

  friend bool operator==(const RoundRecord&, const RoundRecord&) = default;
};

struct RunSummary {
  double avg_survival_rounds = 0.0;
  double total_loot = 0.0;
  double runtime_per_iteration_nanos = 0.0;
  double final_radius_bound = 0.0;  // widest bound held by any bike at the end
  std::size_t iterations = 0;       // executed
  std::size_t rounds_per_iteration = 0;
  std::uint64_t rules_evaluated = 0;
  bool deadlocked = false;
};

enum class Phase {
  Initialization,
  Membership,
  SocialArrangement,
  RoleAssignment,
  TargetDecision,
  AgentActions,
  ApplyEffects,
  Allocation,
  AdmissionExclusion,
};

std::string_view to_string(Phase phase) noexcept;
bool is_operation_phase(Phase phase) noexcept;

struct PhaseEvent {
  std::size_t iteration = 0;
  std::size_t round = 0;  // 0 outside the round loop
  std::uint64_t bike_id = 0;
  Phase phase = Phase::Initialization;

  friend bool operator==(const PhaseEvent&, const PhaseEvent&) = default;
};

enum class DecisionKind { Leader, Target, Allocation, Mutation, Exclusion, Admission, Death };

std::string_view to_string(DecisionKind kind) noexcept;

struct DecisionEvent {
  std::size_t iteration = 0;
  std::size_t round = 0;
  std::uint64_t bike_id = 0;
  DecisionKind kind = DecisionKind::Target;
  std::uint64_t subject = 0;  // agent, lootbox or rule index depending on kind
  double value = 0.0;

  friend bool operator==(const DecisionEvent&, const DecisionEvent&) = default;
};

struct RunMetrics {
  std::vector<RoundRecord> rounds;
  RunSummary summary;
  std::vector<PhaseEvent> phases;        // only with record_trace
  std::vector<DecisionEvent> decisions;  // only with record_trace
};

/// Runs the whole game. Errors: ConfigInvalid, RulesetParseError, IOError.
RunMetrics run_game(const SimConfig& config);

inline constexpr std::uint64_t kGovernedDecisionKinds = 5;

/// i*j*k - i: per-decision deliberations replaced by one contract negotiation
/// per iteration.
std::uint64_t count_deliberation_avoided(std::uint64_t iterations, std::uint64_t rounds,
                                         std::uint64_t kinds = kGovernedDecisionKinds);
std::uint64_t count_deliberation_avoided(const RunMetrics& metrics);

}  // namespace megabike::sim
