#include "megabike/world/world.hpp"

#include <algorithm>
#include <limits>

#include "megabike/error.hpp"

namespace megabike::world {

std::vector<Lootbox> spawn_lootboxes(double ratio, std::size_t agent_count,
                                     const WorldParams& params, Rng& rng) {
  if (!(ratio >= 0.0)) throw Error(Errc::InvalidValue, "lootbox ratio must be non-negative");
  // The epsilon keeps e.g. 0.29 * 100 from flooring to 28.
  const auto count =
      static_cast<std::size_t>(std::floor(ratio * static_cast<double>(agent_count) + 1e-9));
  const double half = params.world_side / 2.0;

  std::vector<Lootbox> boxes;
  boxes.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    Lootbox box;
    box.id = i;
    box.position.x = rng.uniform(-half, half);
    box.position.y = rng.uniform(-half, half);
    box.payoff = rng.uniform(params.payoff_min, params.payoff_max);
    boxes.push_back(box);
  }
  return boxes;
}

GridPosition step_kinematics(const KinematicState& bike,
                             std::span<const agents::PedalAction> forces, double k) {
  double net = 0.0;
  for (const auto& f : forces) {
    net += std::clamp(f.pedal, 0.0, 1.0) - std::clamp(f.brake, 0.0, 1.0);
  }
  net = std::max(net, 0.0);
  if (net == 0.0) return bike.position;
  const double step = net * k;
  return {bike.position.x + step * std::cos(bike.heading),
          bike.position.y + step * std::sin(bike.heading)};
}

ThreatAdvance advance_threat(const ThreatState& threat, std::span<const BikeLocation> bikes,
                             double capture_radius) {
  ThreatAdvance out{threat, {}};
  if (bikes.empty()) return out;

  const BikeLocation* nearest = nullptr;
  double best = std::numeric_limits<double>::infinity();
  for (const auto& bike : bikes) {
    const double d = distance(threat.position, bike.position);
    if (d < best || (d == best && nearest != nullptr && bike.id < nearest->id)) {
      best = d;
      nearest = &bike;
    }
  }

  if (best <= threat.speed) {
    out.threat.position = nearest->position;
  } else {
    const double t = threat.speed / best;
    out.threat.position.x += t * (nearest->position.x - threat.position.x);
    out.threat.position.y += t * (nearest->position.y - threat.position.y);
  }

  for (const auto& bike : bikes) {
    if (distance(out.threat.position, bike.position) <= capture_radius) {
      out.terminated.push_back(bike.id);
    }
  }
  std::sort(out.terminated.begin(), out.terminated.end());
  return out;
}

GridPosition spawn_behind(const GridPosition& bike, double heading, double gap) {
  return {bike.x - gap * std::cos(heading), bike.y - gap * std::sin(heading)};
}

}  // namespace megabike::world
