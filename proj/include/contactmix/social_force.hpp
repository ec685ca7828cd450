// Copyright 2026 The contactmix Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef CONTACTMIX_SOCIAL_FORCE_HPP
#define CONTACTMIX_SOCIAL_FORCE_HPP

// Mass-normalized social force model: relaxation toward a desired velocity,
// exponential repulsion between bodies and exponential repulsion from blocked
// cells, integrated with one explicit Euler step.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <span>
#include <stdexcept>

#include "contactmix/geometry.hpp"
#include "contactmix/random.hpp"
#include "contactmix/scenario.hpp"

namespace contactmix {

struct ForceParameters {
  double relaxation_time_s = 0.5;
  double repulsion_strength = 2.1;  // m/s^2
  double repulsion_range_m = 0.3;
  double obstacle_strength = 2.0;  // m/s^2
  double obstacle_range_m = 0.2;
  double max_speed_factor = 1.3;

  void validate() const {
    if (!(relaxation_time_s > 0 && repulsion_strength > 0 && repulsion_range_m > 0 && obstacle_strength > 0 &&
          obstacle_range_m > 0))
      throw std::invalid_argument("force parameters must be strictly positive");
    if (!(max_speed_factor >= 1.0)) throw std::invalid_argument("max_speed_factor must be at least 1");
  }

  /// Center distance beyond which inter-agent repulsion is below exp(-12) of its contact value.
  double interaction_range(double radius_sum) const { return radius_sum + 12.0 * repulsion_range_m; }
};

struct Pedestrian {
  AgentId id = 0;
  Vec2 position;
  Vec2 velocity;
  double radius_m = 0.25;
};

struct Motion {
  Vec2 position;
  Vec2 velocity;
};

/// Unit vector pushing `self` away from `other` when the two centers coincide.
/// The angle is a golden-ratio hash of the ordered id pair; the two agents get
/// opposite vectors.
inline Vec2 coincident_direction(AgentId self, AgentId other) {
  const std::uint64_t lo = std::min(self, other);
  const std::uint64_t hi = std::max(self, other);
  const std::uint64_t h = (lo * 0x9E3779B97F4A7C15ULL) ^ splitmix64(hi);
  const double angle = 2.0 * std::numbers::pi * (static_cast<double>(h >> 11) * 0x1.0p-53);
  const Vec2 u{std::cos(angle), std::sin(angle)};
  return self == lo ? u : u * -1.0;
}

inline Vec2 repulsion(const Pedestrian& self, const Pedestrian& other, const ForceParameters& params) {
  const Vec2 delta = self.position - other.position;
  const double d = delta.norm();
  const Vec2 n = d > 0.0 ? delta * (1.0 / d) : coincident_direction(self.id, other.id);
  const double magnitude =
      params.repulsion_strength * std::exp((self.radius_m + other.radius_m - d) / params.repulsion_range_m);
  return n * magnitude;
}

/// Repulsion from blocked cells and from the area outside the map.
inline Vec2 obstacle_force(const Pedestrian& self, const EnvironmentMap& map, const ForceParameters& params) {
  const double range = self.radius_m + 12.0 * params.obstacle_range_m;
  const double cs = map.cell_size_m;
  const int reach = static_cast<int>(std::ceil(range / cs));
  const Cell here = map.cell_of(self.position);
  Vec2 force;
  for (int y = here.y - reach; y <= here.y + reach; ++y) {
    for (int x = here.x - reach; x <= here.x + reach; ++x) {
      if (map.walkable(Cell{x, y})) continue;
      const Vec2 closest{std::clamp(self.position.x, x * cs, (x + 1) * cs),
                         std::clamp(self.position.y, y * cs, (y + 1) * cs)};
      const Vec2 delta = self.position - closest;
      const double d = delta.norm();
      if (d <= 0.0 || d > range) continue;
      force += delta * (params.obstacle_strength * std::exp((self.radius_m - d) / params.obstacle_range_m) / d);
    }
  }
  return force;
}

inline Vec2 acceleration(const Pedestrian& self, Vec2 desired_velocity, std::span<const Pedestrian> neighbors,
                         const EnvironmentMap& map, const ForceParameters& params) {
  Vec2 a = (desired_velocity - self.velocity) * (1.0 / params.relaxation_time_s);
  for (const Pedestrian& other : neighbors) {
    if (other.id == self.id) continue;
    a += repulsion(self, other, params);
  }
  a += obstacle_force(self, map, params);
  return a;
}

/// One explicit Euler step. The new speed is capped at max_speed_factor * desired_speed.
/// Motion is applied one axis at a time; an axis whose move would land in a
/// blocked cell (or off the map) is cancelled together with that velocity component.
inline Motion social_force_step(const Pedestrian& self, Vec2 desired_velocity, double desired_speed,
                                std::span<const Pedestrian> neighbors, const EnvironmentMap& map,
                                const ForceParameters& params, double dt) {
  Vec2 v = self.velocity + acceleration(self, desired_velocity, neighbors, map, params) * dt;
  const double cap = params.max_speed_factor * desired_speed;
  const double speed = v.norm();
  if (speed > cap) v = v * (cap / speed);

  const Vec2 step = self.velocity * dt;
  Vec2 p = self.position;
  if (map.walkable(Vec2{p.x + step.x, p.y}))
    p.x += step.x;
  else
    v.x = 0.0;
  if (map.walkable(Vec2{p.x, p.y + step.y}))
    p.y += step.y;
  else
    v.y = 0.0;
  return {p, v};
}

}  // namespace contactmix

#endif  // CONTACTMIX_SOCIAL_FORCE_HPP
