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

#ifndef CONTACTMIX_CONTACTS_HPP
#define CONTACTMIX_CONTACTS_HPP

// Per-tick proximity detection and the contact ledger.
//
// A contact record covers one uninterrupted run of ticks during which a pair of
// agents stayed within the effective radius. A pair that separates for at least
// one tick and meets again gets a new record. Records are never filtered here;
// the minimum-duration criterion is applied when aggregating.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "contactmix/frame.hpp"
#include "contactmix/geometry.hpp"
#include "contactmix/scenario.hpp"
#include "contactmix/spatial_grid.hpp"

namespace contactmix {

struct ContactConfig {
  double radius_m = 2.0;
  double tick_length_s = 1.0;
  Tick min_duration_ticks = 1;
  Tick chunk_ticks = 900;

  void validate() const {
    if (!(radius_m > 0)) throw std::invalid_argument("effective radius must be positive");
    if (!(tick_length_s > 0)) throw std::invalid_argument("tick length must be positive");
    if (min_duration_ticks < 1) throw std::invalid_argument("minimum duration must be at least 1 tick");
    if (chunk_ticks < 1) throw std::invalid_argument("chunk length must be at least 1 tick");
  }
};

struct NeighborPair {
  AgentId a = 0;  // a < b
  AgentId b = 0;
  double distance = 0.0;
  friend bool operator==(const NeighborPair&, const NeighborPair&) = default;
};

namespace detail {

inline void check_sorted_unique(const TickFrame& frame) {
  for (std::size_t i = 1; i < frame.entries.size(); ++i) {
    if (frame.entries[i].id <= frame.entries[i - 1].id) {
      if (frame.entries[i].id == frame.entries[i - 1].id)
        throw std::invalid_argument("agent " + std::to_string(frame.entries[i].id) + " appears twice in tick " +
                                    std::to_string(frame.tick));
      throw std::invalid_argument("frame entries must be sorted by agent id");
    }
  }
}

}  // namespace detail

/// All unordered pairs within `radius` (inclusive), sorted by (a, b).
/// Frame entries must be sorted by id.
inline std::vector<NeighborPair> neighbor_pairs(const TickFrame& frame, double radius) {
  detail::check_sorted_unique(frame);
  std::vector<Vec2> pts;
  pts.reserve(frame.entries.size());
  for (const auto& e : frame.entries) pts.push_back(e.position);
  std::vector<NeighborPair> out;
  for_each_pair_within(pts, radius, [&](std::size_t i, std::size_t j, double d) {
    out.push_back({frame.entries[i].id, frame.entries[j].id, d});
  });
  return out;
}

struct ContactRecord {
  AgentId a = 0;  // a < b
  AgentId b = 0;
  TypeIndex type_a = 0;
  TypeIndex type_b = 0;
  Tick start_tick = 0;
  Tick last_updated_tick = 0;
  Tick running_duration = 0;
  double distance_sum = 0.0;  // sum of the per-tick distances
  bool in_session = false;

  double mean_distance() const { return distance_sum / static_cast<double>(running_duration); }
  friend bool operator==(const ContactRecord&, const ContactRecord&) = default;
};

class NonMonotonicTick : public std::runtime_error {
 public:
  NonMonotonicTick(Tick expected, Tick got)
      : std::runtime_error("expected tick " + std::to_string(expected) + ", got " + std::to_string(got)),
        expected(expected),
        got(got) {}
  Tick expected;
  Tick got;
};

constexpr std::uint64_t pair_key(AgentId a, AgentId b) {
  return (static_cast<std::uint64_t>(std::min(a, b)) << 32) | std::max(a, b);
}

/// Every contact record of a run, one canonical record per unordered pair and
/// session. Single writer.
class ContactLedger {
 public:
  /// Folds one frame into the ledger. Frames must arrive with consecutive ticks.
  void observe_tick(const TickFrame& frame, double radius) {
    if (last_tick_ && frame.tick != *last_tick_ + 1) throw NonMonotonicTick(*last_tick_ + 1, frame.tick);
    detail::check_sorted_unique(frame);
    const Tick t = frame.tick;
    last_tick_ = t;

    pts_.clear();
    for (const auto& e : frame.entries) pts_.push_back(e.position);
    next_open_.clear();
    std::size_t k = 0;
    auto close_until = [&](std::uint64_t key) {
      while (k < open_.size() && open_[k].key < key) {
        records_[open_[k].record].in_session = false;
        ++k;
      }
    };
    for_each_pair_within(pts_, radius, grid_, [&](std::size_t i, std::size_t j, double d) {
      const FrameEntry& ea = frame.entries[i];
      const FrameEntry& eb = frame.entries[j];
      const std::uint64_t key = pair_key(ea.id, eb.id);
      close_until(key);
      if (k < open_.size() && open_[k].key == key) {
        ContactRecord& r = records_[open_[k].record];
        ++r.running_duration;
        r.distance_sum += d;
        r.last_updated_tick = t;
        next_open_.push_back(open_[k]);
        ++k;
        return;
      }
      const auto idx = static_cast<std::uint32_t>(records_.size());
      records_.push_back({ea.id, eb.id, ea.type, eb.type, t, t, 1, d, true});
      by_pair_[key].push_back(idx);
      next_open_.push_back({key, idx});
    });
    for (; k < open_.size(); ++k) records_[open_[k].record].in_session = false;
    open_.swap(next_open_);
  }

  /// Closes every in-session record. Idempotent; durations are untouched.
  void finalize() {
    for (const auto& o : open_) records_[o.record].in_session = false;
    open_.clear();
  }

  std::span<const ContactRecord> records() const { return records_; }
  std::size_t in_session_count() const { return open_.size(); }
  std::optional<Tick> last_tick() const { return last_tick_; }

  /// Records of one pair in start order.
  std::vector<ContactRecord> history(AgentId a, AgentId b) const {
    std::vector<ContactRecord> out;
    auto it = by_pair_.find(pair_key(a, b));
    if (it == by_pair_.end()) return out;
    for (auto idx : it->second) out.push_back(records_[idx]);
    return out;
  }

  std::size_t pair_count() const { return by_pair_.size(); }

  friend bool operator==(const ContactLedger& x, const ContactLedger& y) {
    return x.records_ == y.records_ && x.last_tick_ == y.last_tick_;
  }

 private:
  struct OpenSession {
    std::uint64_t key;
    std::uint32_t record;
  };

  std::vector<ContactRecord> records_;
  std::unordered_map<std::uint64_t, std::vector<std::uint32_t>> by_pair_;
  std::vector<OpenSession> open_;  // sorted by key
  std::optional<Tick> last_tick_;

  std::vector<OpenSession> next_open_;
  std::vector<Vec2> pts_;
  UniformGrid grid_;
};

/// Which agents exist, their types, and the population of each type. Populations
/// are the denominators of every normalized matrix, so they count every member
/// of a type, whether or not it was ever in contact.
struct Roster {
  std::vector<std::string> type_names;
  std::vector<std::int64_t> populations;
  std::vector<AgentId> agents;           // ascending
  std::vector<TypeIndex> agent_types;    // parallel to `agents`

  static Roster from_scenario(const Scenario& s) {
    Roster r;
    r.type_names = s.type_names();
    r.populations = s.populations();
    r.agent_types = s.roster();
    r.agents.resize(r.agent_types.size());
    for (std::size_t i = 0; i < r.agents.size(); ++i) r.agents[i] = static_cast<AgentId>(i);
    return r;
  }

  std::optional<std::size_t> index_of(AgentId id) const {
    auto it = std::lower_bound(agents.begin(), agents.end(), id);
    if (it == agents.end() || *it != id) return std::nullopt;
    return static_cast<std::size_t>(it - agents.begin());
  }

  std::optional<TypeIndex> type_of(AgentId id) const {
    if (auto i = index_of(id)) return agent_types[*i];
    return std::nullopt;
  }

  friend bool operator==(const Roster&, const Roster&) = default;
};

}  // namespace contactmix

#endif  // CONTACTMIX_CONTACTS_HPP
