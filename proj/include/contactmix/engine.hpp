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

#ifndef CONTACTMIX_ENGINE_HPP
#define CONTACTMIX_ENGINE_HPP

// Fixed-step simulation of a Scenario. Each tick runs three phases in order:
//   1. workflow: arrivals, then every present agent advances its workflow in id
//      order, then waiting agents are admitted to locations with free capacity;
//   2. physics: `physics_substeps` social-force steps over all present agents;
//   3. output: one TickFrame with the positions of every present agent.

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "contactmix/frame.hpp"
#include "contactmix/geometry.hpp"
#include "contactmix/random.hpp"
#include "contactmix/routing.hpp"
#include "contactmix/scenario.hpp"
#include "contactmix/social_force.hpp"
#include "contactmix/spatial_grid.hpp"

namespace contactmix {

struct SimConfig {
  double tick_length_s = 1.0;
  int physics_substeps = 10;
  Tick horizon = 3600;
  std::uint64_t seed = 0;
  ForceParameters forces;
  double waypoint_threshold_m = 0.5;

  void validate() const {
    if (!(tick_length_s > 0)) throw std::invalid_argument("tick_length_s must be positive");
    if (physics_substeps < 1) throw std::invalid_argument("physics_substeps must be at least 1");
    if (horizon < 0) throw std::invalid_argument("horizon must be nonnegative");
    if (!(waypoint_threshold_m > 0)) throw std::invalid_argument("waypoint_threshold_m must be positive");
    forces.validate();
  }
};

/// A workflow that cannot be carried out on the map, e.g. an unreachable location.
class RunFault : public std::runtime_error {
 public:
  RunFault(AgentId agent, std::string agent_type, std::string location)
      : std::runtime_error("agent " + std::to_string(agent) + " (" + agent_type + ") has no route to location '" +
                           location + "'"),
        agent(agent),
        agent_type(std::move(agent_type)),
        location(std::move(location)) {}

  AgentId agent;
  std::string agent_type;
  std::string location;
};

struct RunSummary {
  Tick ticks = 0;
  std::int64_t arrivals = 0;
  std::int64_t departures = 0;
  std::int64_t routes_planned = 0;
  friend bool operator==(const RunSummary&, const RunSummary&) = default;
};

struct AgentView {
  AgentId id = 0;
  TypeIndex type = 0;
  bool present = false;
  bool departed = false;
  Vec2 position;
  Vec2 velocity;
  double desired_speed = 0.0;
  std::optional<std::size_t> held_location;
};

/// Stepwise simulation. Holds a reference to the scenario, which must outlive it.
class Simulation {
 public:
  Simulation(const Scenario& scenario, SimConfig config) : scenario_(scenario), config_(std::move(config)) {
    config_.validate();
    const auto& types = scenario_.agent_types;
    AgentId next_id = 0;
    double max_radius = 0.0;
    for (std::size_t t = 0; t < types.size(); ++t) {
      const auto& spec = types[t];
      max_radius = std::max(max_radius, spec.radius_m);
      for (std::int64_t k = 0; k < spec.population; ++k) {
        Agent a;
        a.id = next_id++;
        a.type = static_cast<TypeIndex>(t);
        a.rng = RandomStream::derive(config_.seed, a.id);
        a.desired_speed = spec.desired_speed.sample(a.rng);
        a.radius = spec.radius_m;
        a.arrival_tick = seconds_to_ticks(spec.arrival_s[static_cast<std::size_t>(k)], config_.tick_length_s);
        agents_.push_back(std::move(a));
      }
    }
    for (const auto& a : agents_) arrival_order_.emplace_back(a.arrival_tick, a.id);
    std::sort(arrival_order_.begin(), arrival_order_.end());
    interaction_cutoff_ = config_.forces.interaction_range(2.0 * max_radius);
    occupancy_.assign(scenario_.map.locations.size(), 0);
    waiters_.resize(scenario_.map.locations.size());
  }

  Simulation(const Simulation&) = delete;
  Simulation& operator=(const Simulation&) = delete;

  bool finished() const { return tick_ >= config_.horizon; }
  Tick next_tick() const { return tick_; }
  const SimConfig& config() const { return config_; }
  const RunSummary& summary() const { return summary_; }
  std::size_t agent_count() const { return agents_.size(); }
  std::int64_t occupancy(std::size_t location) const { return occupancy_.at(location); }

  AgentView agent(AgentId id) const {
    const Agent& a = agents_.at(id);
    return {a.id, a.type, a.present, a.departed, a.position, a.velocity, a.desired_speed, a.held};
  }

  /// Runs one tick and returns its frame. The frame stays valid until the next call.
  const TickFrame& advance() {
    const Tick t = tick_;
    while (next_arrival_ < arrival_order_.size() && arrival_order_[next_arrival_].first <= t) {
      arrive(agents_[arrival_order_[next_arrival_].second]);
      ++next_arrival_;
    }
    for (Agent& a : agents_) {
      if (!a.present) continue;
      replan_if_blocked(a);
      step_workflow(a, t);
    }
    admit_waiters(t);

    const double dt = config_.tick_length_s / config_.physics_substeps;
    for (int s = 0; s < config_.physics_substeps; ++s) physics_substep(dt);

    frame_.tick = t;
    frame_.entries.clear();
    for (const Agent& a : agents_)
      if (a.present) frame_.entries.push_back({a.id, a.type, a.position});
    ++tick_;
    summary_.ticks = tick_;
    return frame_;
  }

 private:
  static constexpr int kMaxInstantSteps = 256;
  static constexpr double kSlowdownRadius = 0.5;

  struct Cursor {
    const std::vector<WorkflowStep>* steps = nullptr;
    std::size_t index = 0;
    std::int64_t iterations = 0;
    std::int64_t repeat_limit = std::numeric_limits<std::int64_t>::max();
    Tick until_tick = std::numeric_limits<Tick>::max();
  };

  enum class Phase { start, walking, dwelling, waiting, idle };

  struct Agent {
    AgentId id = 0;
    TypeIndex type = 0;
    double desired_speed = 1.0;
    double radius = 0.25;
    Tick arrival_tick = 0;
    RandomStream rng;
    bool present = false;
    bool departed = false;
    Vec2 position;
    Vec2 velocity;
    std::vector<Cursor> stack;
    Phase phase = Phase::start;
    std::vector<Vec2> route;
    std::size_t next_waypoint = 0;
    Cell route_goal;
    std::size_t route_location = 0;
    Vec2 hold_point;
    Tick dwell_until = 0;
    std::optional<std::size_t> held;
  };

  struct Waiter {
    Tick since;
    AgentId id;
    friend auto operator<=>(const Waiter&, const Waiter&) = default;
  };

  const EnvironmentMap& map() const { return scenario_.map; }

  void arrive(Agent& a) {
    const auto& spec = scenario_.agent_types[a.type];
    const Location& spawn = map().locations[spec.spawn];
    const Cell c = spawn.cells[a.rng.below(spawn.cells.size())];
    a.present = true;
    a.position = map().center(c);
    a.velocity = {};
    a.hold_point = a.position;
    a.stack.push_back({&spec.workflow});
    a.phase = Phase::start;
    ++summary_.arrivals;
  }

  bool has_room(std::size_t loc) const {
    const auto& cap = map().locations[loc].capacity;
    return !cap || occupancy_[loc] < *cap;
  }

  void release(Agent& a) {
    if (a.held) --occupancy_[*a.held];
    a.held.reset();
  }

  void reserve(Agent& a, std::size_t loc) {
    if (a.held == loc) return;
    release(a);
    ++occupancy_[loc];
    a.held = loc;
  }

  Route plan_for(const Agent& a, Cell goal, std::size_t loc) {
    try {
      Route r = plan_route(map(), map().cell_of(a.position), goal);
      ++summary_.routes_planned;
      return r;
    } catch (const NoRouteError&) {
      throw RunFault(a.id, scenario_.agent_types[a.type].name, map().locations[loc].name);
    }
  }

  void adopt_route(Agent& a, const Route& r, std::size_t loc) {
    a.route = r.waypoints(map());
    if (a.route.size() > 1) a.route.erase(a.route.begin());
    a.next_waypoint = 0;
    a.route_goal = r.cells.back();
    a.route_location = loc;
    a.hold_point = a.route.back();
  }

  void set_route(Agent& a, Cell goal, std::size_t loc) { adopt_route(a, plan_for(a, goal, loc), loc); }

  // Route toward `loc` that stops on the last cell before entering it.
  void set_boundary_route(Agent& a, std::size_t loc) {
    const Location& target = map().locations[loc];
    if (target.contains(map().cell_of(a.position))) {
      a.route.clear();
      a.next_waypoint = 0;
      a.hold_point = a.position;
      return;
    }
    Route r = plan_for(a, target.anchor, loc);
    auto first_inside = std::find_if(r.cells.begin(), r.cells.end(), [&](Cell c) { return target.contains(c); });
    r.cells.erase(first_inside, r.cells.end());
    adopt_route(a, r, loc);
  }

  void advance_waypoints(Agent& a) const {
    while (a.next_waypoint < a.route.size() &&
           distance(a.position, a.route[a.next_waypoint]) <= config_.waypoint_threshold_m)
      ++a.next_waypoint;
  }

  bool segment_clear(Vec2 from, Vec2 to) const {
    const double len = distance(from, to);
    const int n = std::max(1, static_cast<int>(std::ceil(len / (0.25 * map().cell_size_m))));
    for (int k = 0; k <= n; ++k) {
      const double s = static_cast<double>(k) / n;
      if (!map().walkable(from + (to - from) * s)) return false;
    }
    return true;
  }

  void replan_if_blocked(Agent& a) {
    if (a.next_waypoint >= a.route.size()) return;
    if (segment_clear(a.position, a.route[a.next_waypoint])) return;
    set_route(a, a.route_goal, a.route_location);
  }

  void enqueue(Agent& a, std::size_t loc, Tick t) {
    auto& q = waiters_[loc];
    const Waiter w{t, a.id};
    q.insert(std::upper_bound(q.begin(), q.end(), w), w);
    a.phase = Phase::waiting;
  }

  void complete_step(Agent& a) {
    ++a.stack.back().index;
    a.phase = Phase::start;
  }

  bool arrived(const Agent& a, std::size_t loc) const {
    return a.next_waypoint >= a.route.size() || map().locations[loc].contains(map().cell_of(a.position));
  }

  void step_workflow(Agent& a, Tick t) {
    for (int guard = 0; guard < kMaxInstantSteps; ++guard) {
      if (a.stack.empty()) {
        a.phase = Phase::idle;
        return;
      }
      Cursor& cur = a.stack.back();
      if (cur.index >= cur.steps->size()) {
        if (a.stack.size() == 1) {
          a.stack.clear();
          a.phase = Phase::idle;
          return;
        }
        ++cur.iterations;
        cur.index = 0;
        if (cur.iterations >= cur.repeat_limit || t >= cur.until_tick) {
          a.stack.pop_back();
          complete_step(a);
        }
        continue;
      }
      const WorkflowStep& step = (*cur.steps)[cur.index];
      switch (a.phase) {
        case Phase::start:
          switch (step.kind) {
            case WorkflowStep::Kind::go_to:
              if (a.held == step.location || (waiters_[step.location].empty() && has_room(step.location))) {
                reserve(a, step.location);
                set_route(a, map().locations[step.location].anchor, step.location);
                a.phase = Phase::walking;
                continue;
              }
              release(a);
              set_boundary_route(a, step.location);
              enqueue(a, step.location, t);
              return;
            case WorkflowStep::Kind::queue:
              if (a.held == step.location || (waiters_[step.location].empty() && has_room(step.location))) {
                reserve(a, step.location);
                complete_step(a);
                continue;
              }
              enqueue(a, step.location, t);
              return;
            case WorkflowStep::Kind::dwell:
              a.dwell_until = t + sample_duration(step.duration, a.rng, config_.tick_length_s);
              a.phase = Phase::dwelling;
              continue;
            case WorkflowStep::Kind::cycle: {
              Cursor body{&step.body};
              if (step.repeat) body.repeat_limit = *step.repeat;
              if (step.until_s) body.until_tick = seconds_to_ticks(*step.until_s, config_.tick_length_s);
              if (body.repeat_limit <= 0 || t >= body.until_tick) {
                complete_step(a);
              } else {
                a.stack.push_back(body);
              }
              continue;
            }
            case WorkflowStep::Kind::depart:
              release(a);
              a.present = false;
              a.departed = true;
              a.stack.clear();
              a.route.clear();
              a.phase = Phase::idle;
              ++summary_.departures;
              return;
          }
          return;
        case Phase::walking:
          advance_waypoints(a);
          if (!arrived(a, step.location)) return;
          complete_step(a);
          continue;
        case Phase::dwelling:
          if (t < a.dwell_until) return;
          complete_step(a);
          continue;
        case Phase::waiting:
        case Phase::idle:
          return;
      }
    }
  }

  void admit_waiters(Tick t) {
    bool progress = true;
    while (progress) {
      progress = false;
      for (std::size_t loc = 0; loc < waiters_.size(); ++loc) {
        while (!waiters_[loc].empty() && has_room(loc)) {
          Agent& a = agents_[waiters_[loc].front().id];
          waiters_[loc].erase(waiters_[loc].begin());
          reserve(a, loc);
          const WorkflowStep& step = (*a.stack.back().steps)[a.stack.back().index];
          if (step.kind == WorkflowStep::Kind::go_to) {
            set_route(a, map().locations[loc].anchor, loc);
            a.phase = Phase::walking;
          } else {
            complete_step(a);
          }
          step_workflow(a, t);
          progress = true;
        }
      }
    }
  }

  Vec2 desired_velocity(const Agent& a) const {
    const bool on_route = a.next_waypoint < a.route.size();
    const Vec2 target = on_route ? a.route[a.next_waypoint] : a.hold_point;
    const bool last_leg = !on_route || a.next_waypoint + 1 == a.route.size();
    const Vec2 delta = target - a.position;
    const double d = delta.norm();
    if (d < 1e-9) return {};
    double speed = a.desired_speed;
    if (last_leg) speed *= std::min(1.0, d / kSlowdownRadius);
    return delta * (speed / d);
  }

  void physics_substep(double dt) {
    peds_.clear();
    positions_.clear();
    present_.clear();
    for (Agent& a : agents_) {
      if (!a.present) continue;
      present_.push_back(&a);
      peds_.push_back({a.id, a.position, a.velocity, a.radius});
      positions_.push_back(a.position);
    }
    const std::size_t n = peds_.size();
    if (n == 0) return;

    // Neighbor lists in CSR form, each sorted by id.
    pair_buf_.clear();
    for_each_pair_within(positions_, interaction_cutoff_, grid_,
                         [&](std::size_t i, std::size_t j, double) { pair_buf_.emplace_back(i, j); });
    nb_start_.assign(n + 1, 0);
    for (const auto& [i, j] : pair_buf_) {
      ++nb_start_[i + 1];
      ++nb_start_[j + 1];
    }
    for (std::size_t i = 0; i < n; ++i) nb_start_[i + 1] += nb_start_[i];
    nb_items_.resize(nb_start_[n]);
    nb_fill_.assign(nb_start_.begin(), nb_start_.end() - 1);
    for (const auto& [i, j] : pair_buf_) {
      nb_items_[nb_fill_[j]++] = static_cast<std::uint32_t>(i);
      nb_items_[nb_fill_[i]++] = static_cast<std::uint32_t>(j);
    }

    motions_.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      scratch_.clear();
      for (std::size_t k = nb_start_[i]; k < nb_start_[i + 1]; ++k) scratch_.push_back(peds_[nb_items_[k]]);
      const Agent& a = *present_[i];
      motions_[i] =
          social_force_step(peds_[i], desired_velocity(a), a.desired_speed, scratch_, map(), config_.forces, dt);
    }
    for (std::size_t i = 0; i < n; ++i) {
      Agent& a = *present_[i];
      a.position = motions_[i].position;
      a.velocity = motions_[i].velocity;
      advance_waypoints(a);
    }
  }

  const Scenario& scenario_;
  SimConfig config_;
  std::vector<Agent> agents_;
  std::vector<std::pair<Tick, AgentId>> arrival_order_;
  std::size_t next_arrival_ = 0;
  std::vector<std::int64_t> occupancy_;
  std::vector<std::vector<Waiter>> waiters_;
  double interaction_cutoff_ = 1.0;
  Tick tick_ = 0;
  RunSummary summary_;
  TickFrame frame_;

  // Physics scratch space, reused across substeps.
  UniformGrid grid_;
  std::vector<Pedestrian> peds_;
  std::vector<Vec2> positions_;
  std::vector<Agent*> present_;
  std::vector<std::pair<std::size_t, std::size_t>> pair_buf_;
  std::vector<std::uint32_t> nb_start_;
  std::vector<std::uint32_t> nb_fill_;
  std::vector<std::uint32_t> nb_items_;
  std::vector<Pedestrian> scratch_;
  std::vector<Motion> motions_;
};

/// Runs `config.horizon` ticks and hands every frame, in tick order, to `observer`.
template <std::invocable<const TickFrame&> Observer>
RunSummary run(const Scenario& scenario, const SimConfig& config, Observer&& observer) {
  Simulation sim(scenario, config);
  while (!sim.finished()) observer(sim.advance());
  return sim.summary();
}

}  // namespace contactmix

#endif  // CONTACTMIX_ENGINE_HPP
