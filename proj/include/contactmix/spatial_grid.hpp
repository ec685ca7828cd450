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

#ifndef CONTACTMIX_SPATIAL_GRID_HPP
#define CONTACTMIX_SPATIAL_GRID_HPP

// Uniform-grid index for fixed-radius neighbor queries in the plane.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "contactmix/geometry.hpp"

namespace contactmix {

class UniformGrid {
 public:
  /// Indexes `points` with cells at least `radius` wide, so every pair within
  /// `radius` lies in the same or an adjacent cell. Sparse layouts get wider
  /// cells to keep the cell count proportional to the point count.
  void build(std::span<const Vec2> points, double radius) {
    cell_start_.clear();
    items_.clear();
    if (points.empty()) {
      nx_ = ny_ = 0;
      return;
    }
    min_ = max_ = points[0];
    for (const Vec2& p : points) {
      min_.x = std::min(min_.x, p.x);
      min_.y = std::min(min_.y, p.y);
      max_.x = std::max(max_.x, p.x);
      max_.y = std::max(max_.y, p.y);
    }
    // The slack keeps |dx| <= radius from straddling two cell boundaries under rounding.
    edge_ = radius * (1.0 + 1e-9);
    const std::size_t limit = std::max<std::size_t>(1024, 4 * points.size());
    for (;;) {
      const double fx = std::floor((max_.x - min_.x) / edge_) + 1.0;
      const double fy = std::floor((max_.y - min_.y) / edge_) + 1.0;
      if (fx * fy <= static_cast<double>(limit)) {
        nx_ = static_cast<std::size_t>(fx);
        ny_ = static_cast<std::size_t>(fy);
        break;
      }
      edge_ *= 2.0;
    }
    cell_start_.assign(nx_ * ny_ + 1, 0);
    cell_of_.resize(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) {
      cell_of_[i] = cell_index(points[i]);
      ++cell_start_[cell_of_[i] + 1];
    }
    for (std::size_t c = 0; c < nx_ * ny_; ++c) cell_start_[c + 1] += cell_start_[c];
    items_.resize(points.size());
    fill_.assign(cell_start_.begin(), cell_start_.end() - 1);
    for (std::size_t i = 0; i < points.size(); ++i) items_[fill_[cell_of_[i]]++] = static_cast<std::uint32_t>(i);
  }

  /// Calls f(j) for every indexed point in the 3x3 block of cells around point i (i included).
  template <class F>
  void for_each_candidate(std::size_t i, F&& f) const {
    const std::size_t c = cell_of_[i];
    const std::size_t cx = c % nx_;
    const std::size_t cy = c / nx_;
    const std::size_t x0 = cx == 0 ? 0 : cx - 1;
    const std::size_t y0 = cy == 0 ? 0 : cy - 1;
    const std::size_t x1 = std::min(cx + 1, nx_ - 1);
    const std::size_t y1 = std::min(cy + 1, ny_ - 1);
    for (std::size_t y = y0; y <= y1; ++y) {
      const std::size_t row = y * nx_;
      for (std::size_t k = cell_start_[row + x0]; k < cell_start_[row + x1 + 1]; ++k) f(items_[k]);
    }
  }

  double cell_edge() const { return edge_; }
  std::size_t cell_count() const { return nx_ * ny_; }

 private:
  std::size_t cell_index(Vec2 p) const {
    const auto x = std::min(static_cast<std::size_t>((p.x - min_.x) / edge_), nx_ - 1);
    const auto y = std::min(static_cast<std::size_t>((p.y - min_.y) / edge_), ny_ - 1);
    return y * nx_ + x;
  }

  Vec2 min_, max_;
  double edge_ = 1.0;
  std::size_t nx_ = 0;
  std::size_t ny_ = 0;
  std::vector<std::uint32_t> cell_start_;
  std::vector<std::uint32_t> fill_;
  std::vector<std::size_t> cell_of_;
  std::vector<std::uint32_t> items_;
};

/// Visits each unordered pair (i, j), i < j, with distance(points[i], points[j]) <= radius,
/// ordered by (i, j). Points must have finite coordinates.
template <class F>
void for_each_pair_within(std::span<const Vec2> points, double radius, UniformGrid& grid, F&& f) {
  grid.build(points, radius);
  struct Hit {
    std::uint32_t j;
    double d;
  };
  std::vector<Hit> hits;
  for (std::size_t i = 0; i < points.size(); ++i) {
    hits.clear();
    const Vec2 p = points[i];
    grid.for_each_candidate(i, [&](std::uint32_t j) {
      if (j <= i) return;
      const double d = distance(p, points[j]);
      if (d <= radius) hits.push_back({j, d});
    });
    std::sort(hits.begin(), hits.end(), [](const Hit& a, const Hit& b) { return a.j < b.j; });
    for (const Hit& h : hits) f(i, static_cast<std::size_t>(h.j), h.d);
  }
}

template <class F>
void for_each_pair_within(std::span<const Vec2> points, double radius, F&& f) {
  UniformGrid grid;
  for_each_pair_within(points, radius, grid, std::forward<F>(f));
}

}  // namespace contactmix

#endif  // CONTACTMIX_SPATIAL_GRID_HPP
