#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "megabike/agents/agent.hpp"
#include "megabike/rng.hpp"

namespace megabike::world {

struct GridPosition {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const GridPosition&, const GridPosition&) = default;
};

inline double distance(const GridPosition& a, const GridPosition& b) noexcept {
  return std::hypot(a.x - b.x, a.y - b.y);
}

inline double bearing(const GridPosition& from, const GridPosition& to) noexcept {
  return std::atan2(to.y - from.y, to.x - from.x);
}

struct WorldParams {
  double world_side = 2000.0;       // lootboxes land in a square of this side around the origin
  double threat_speed = 2.0;        // grid units per round
  double capture_radius = 10.0;
  double acquisition_radius = 5.0;
  double payoff_min = 10.0;
  double payoff_max = 50.0;
  double force_to_displacement = 1.0;  // K: grid units per unit net force
  double threat_spawn_gap = 50.0;
  double bike_spawn_side = 0.0;     // 0: every bike starts at the origin
  bool threat_per_bike = false;     // false: one threat behind the first bike hunts them all
};

struct Lootbox {
  std::uint64_t id = 0;
  GridPosition position;
  double payoff = 0.0;
  bool consumed = false;
};

struct ThreatState {
  GridPosition position;
  double speed = 0.0;
};

/// floor(ratio * agent_count) lootboxes, uniform over the world square,
/// payoffs uniform on [payoff_min, payoff_max]. Ids are 0..n-1.
std::vector<Lootbox> spawn_lootboxes(double ratio, std::size_t agent_count,
                                     const WorldParams& params, Rng& rng);

struct KinematicState {
  GridPosition position;
  double heading = 0.0;  // already set by the steering directive
};

/// Net force = sum(pedal) - sum(brake), each clamped to [0, 1] and the total
/// floored at 0; the bike advances net * K along its heading.
GridPosition step_kinematics(const KinematicState& bike,
                             std::span<const agents::PedalAction> forces, double k);

struct BikeLocation {
  std::uint64_t id = 0;
  GridPosition position;
};

struct ThreatAdvance {
  ThreatState threat;
  std::vector<std::uint64_t> terminated;
};

/// Moves the threat `speed` units toward the nearest bike (lowest id on ties,
/// never overshooting), then terminates every bike within capture_radius.
ThreatAdvance advance_threat(const ThreatState& threat, std::span<const BikeLocation> bikes,
                             double capture_radius);

/// Threat position `gap` units behind a bike with the given heading.
GridPosition spawn_behind(const GridPosition& bike, double heading, double gap);

}  // namespace megabike::world
