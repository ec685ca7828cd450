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

#ifndef CONTACTMIX_ROUTING_HPP
#define CONTACTMIX_ROUTING_HPP

// Shortest paths on the 8-connected walkable grid (orthogonal step 1, diagonal
// step sqrt(2)). A diagonal step is allowed only when both orthogonal cells it
// passes between are walkable, so straight segments between consecutive cell
// centers never cross a blocked cell.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <queue>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include "contactmix/geometry.hpp"
#include "contactmix/scenario.hpp"

namespace contactmix {

class NoRouteError : public std::runtime_error {
 public:
  NoRouteError(Cell from, Cell to)
      : std::runtime_error("no route from [" + std::to_string(from.x) + ", " + std::to_string(from.y) +
                           "] to [" + std::to_string(to.x) + ", " + std::to_string(to.y) + "]"),
        from(from),
        to(to) {}
  Cell from;
  Cell to;
};

struct Route {
  std::vector<Cell> cells;  // from ... to, inclusive
  double cost = 0.0;

  std::vector<Vec2> waypoints(const EnvironmentMap& map) const {
    std::vector<Vec2> out;
    out.reserve(cells.size());
    for (Cell c : cells) out.push_back(map.center(c));
    return out;
  }
};

struct GridMove {
  int dx;
  int dy;
  double cost;
};

inline constexpr double kSqrt2 = 1.4142135623730951;

inline constexpr std::array<GridMove, 8> kGridMoves{{{1, 0, 1.0},
                                                     {-1, 0, 1.0},
                                                     {0, 1, 1.0},
                                                     {0, -1, 1.0},
                                                     {1, 1, kSqrt2},
                                                     {1, -1, kSqrt2},
                                                     {-1, 1, kSqrt2},
                                                     {-1, -1, kSqrt2}}};

/// True when moving from `c` by `m` stays on walkable cells without cutting a corner.
inline bool can_move(const EnvironmentMap& map, Cell c, const GridMove& m) {
  const Cell n{c.x + m.dx, c.y + m.dy};
  if (!map.walkable(n)) return false;
  if (m.dx != 0 && m.dy != 0)
    return map.walkable(Cell{c.x + m.dx, c.y}) && map.walkable(Cell{c.x, c.y + m.dy});
  return true;
}

/// A* with the octile heuristic. Ties are broken by cell index, so the result is deterministic.
inline Route plan_route(const EnvironmentMap& map, Cell from, Cell to) {
  if (!map.walkable(from) || !map.walkable(to))
    throw std::invalid_argument("plan_route: endpoints must be walkable cells");
  if (from == to) return {{from}, 0.0};

  const std::size_t n = static_cast<std::size_t>(map.width) * map.height;
  constexpr double kInf = std::numeric_limits<double>::infinity();
  constexpr std::uint32_t kNone = std::numeric_limits<std::uint32_t>::max();
  std::vector<double> g(n, kInf);
  std::vector<std::uint32_t> parent(n, kNone);
  std::vector<std::uint8_t> closed(n, 0);

  auto heuristic = [&](Cell c) {
    const double dx = std::abs(c.x - to.x);
    const double dy = std::abs(c.y - to.y);
    return std::max(dx, dy) + (kSqrt2 - 1.0) * std::min(dx, dy);
  };
  using Entry = std::tuple<double, double, std::uint32_t>;  // f, h, cell index
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> open;

  const auto start = static_cast<std::uint32_t>(map.index(from));
  const auto goal = static_cast<std::uint32_t>(map.index(to));
  g[start] = 0.0;
  open.emplace(heuristic(from), heuristic(from), start);
  while (!open.empty()) {
    const auto [f, h, idx] = open.top();
    open.pop();
    if (closed[idx]) continue;
    closed[idx] = 1;
    if (idx == goal) break;
    const Cell c{static_cast<int>(idx % map.width), static_cast<int>(idx / map.width)};
    for (const GridMove& m : kGridMoves) {
      if (!can_move(map, c, m)) continue;
      const Cell nc{c.x + m.dx, c.y + m.dy};
      const auto ni = static_cast<std::uint32_t>(map.index(nc));
      if (closed[ni]) continue;
      const double ng = g[idx] + m.cost;
      if (ng < g[ni]) {
        g[ni] = ng;
        parent[ni] = idx;
        const double nh = heuristic(nc);
        open.emplace(ng + nh, nh, ni);
      }
    }
  }
  if (!closed[goal]) throw NoRouteError(from, to);

  Route route;
  route.cost = g[goal];
  for (std::uint32_t i = goal; i != kNone; i = parent[i])
    route.cells.push_back({static_cast<int>(i % map.width), static_cast<int>(i / map.width)});
  std::reverse(route.cells.begin(), route.cells.end());
  return route;
}

}  // namespace contactmix

#endif  // CONTACTMIX_ROUTING_HPP
