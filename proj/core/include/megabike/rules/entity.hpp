#pragma once

#include <cstdint>
#include <variant>
#include <vector>

namespace megabike::rules {

// Scalar snapshots that rule inputs read from. Each governed decision builds
// the snapshot kind it needs; a binding for another kind is undefined on it.

struct LootboxView {
  std::uint64_t id = 0;
  double distance = 0.0;  // grid units from the deciding bike
  double payoff = 0.0;    // energy units
};

struct AgentView {
  std::uint64_t id = 0;
  double energy = 0.0;
  double energy_fraction = 0.0;  // energy / E_max
  double contribution = 0.0;
};

struct BikeView {
  std::uint64_t id = 0;
  double occupancy = 0.0;
  double free_seats = 0.0;
  double threat_distance = 0.0;
  double target_distance = 0.0;
};

struct EnvironmentView {
  double round = 0.0;
  double alive_agents = 0.0;
  double lootboxes_remaining = 0.0;
};

/// Anonymous feature vector; read by the f0..f15 bindings.
struct FeatureView {
  std::vector<double> values;
};

using Entity = std::variant<LootboxView, AgentView, BikeView, EnvironmentView, FeatureView>;

}  // namespace megabike::rules
