#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "megabike/agents/agent.hpp"
#include "megabike/governance/megabike.hpp"
#include "megabike/rules/rule.hpp"
#include "megabike/world/world.hpp"

namespace megabike::sim {

struct SimConfig {
  std::size_t max_iterations = 100;
  std::size_t max_rounds = 100;
  std::size_t agent_count = 100;
  std::size_t seats = 8;
  double lootbox_ratio = 1.0;
  std::optional<std::filesystem::path> ruleset_path;
  // Used instead of the file when set; neither set means the radius rule alone.
  std::optional<std::vector<rules::Rule>> base_rules;
  bool is_mutable = true;
  bool stratified = true;
  std::uint64_t seed = 0;
  governance::AllocationPolicy allocation = governance::AllocationPolicy::Equal;
  std::size_t deadlock_rounds = 10;
  // Rule that agents propose slack on, and whose bound is reported as radiusBound.
  std::string slack_rule = "radius-1000";
  std::size_t slack_row = 0;
  bool record_trace = false;
  world::WorldParams world;
  agents::AgentParams agent;
};

/// Throws ConfigInvalid describing the first violated constraint.
void validate(const SimConfig& config);

/// Reads a JSON config. Relative rulesetPath values resolve against the config
/// file's directory. Errors: ConfigInvalid, IOError.
SimConfig load_config(const std::filesystem::path& path);
SimConfig parse_config(const std::string& json_text,
                       const std::filesystem::path& base_dir = {});
std::string config_to_json(const SimConfig& config);

/// TargetSelection rule `distance - 1000 <= 0`.
rules::Rule radius_rule(double radius = 1000.0, bool is_mutable = true,
                        std::string name = "radius-1000");

/// The rules a run starts from, after the mutability arm is applied: in the
/// immutable arm every rule is frozen. Errors: RulesetParseError, IOError.
std::vector<rules::Rule> resolve_base_rules(const SimConfig& config);

/// World and agent parameters under which the scarcity experiment separates
/// its arms: a 1500-cell world with bikes scattered over it, one chaser per
/// bike, K = 4, payoffs 15-60, pedalling at 1 and resting at 1.5 energy per round.
void apply_scarcity_physics(SimConfig& config);

}  // namespace megabike::sim
