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

#ifndef CONTACTMIX_AGGREGATE_HPP
#define CONTACTMIX_AGGREGATE_HPP

// Aggregation of a finalized ledger into contact matrices.
//
//   records --(per pair)--> PairSummary --> agent x agent
//                                       --> agent x type   (normalized per host)
//                                       --> type x type    (normalized per type pair)
//
// Count and duration cells are normalized by the number of potential partners:
// n_A * n_B across types, 2 * C(n_A, 2) ordered pairs within a type (equal to
// the unordered sum over C(n_A, 2)). Distance cells are duration-weighted means
// of the per-record mean distances. A normalization with no potential partners
// leaves the cell undefined.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "contactmix/contacts.hpp"
#include "contactmix/geometry.hpp"

namespace contactmix {

constexpr std::uint64_t choose2(std::uint64_t n) { return n < 2 ? 0 : n * (n - 1) / 2; }

/// Unique unordered pairs among two disjoint sets: cross pairs plus the pairs within each set.
constexpr std::uint64_t max_unique_contacts(std::uint64_t n_a, std::uint64_t n_b) {
  return n_a * n_b + choose2(n_a) + choose2(n_b);
}

struct PairSummary {
  AgentId a = 0;  // a < b
  AgentId b = 0;
  TypeIndex type_a = 0;
  TypeIndex type_b = 0;
  std::int64_t contact_count = 0;
  Tick cumulative_duration = 0;
  double distance_time = 0.0;  // sum over records of mean distance * duration

  double weighted_mean_distance() const { return distance_time / static_cast<double>(cumulative_duration); }
  friend bool operator==(const PairSummary&, const PairSummary&) = default;
};

/// One summary per pair that has at least one record lasting `min_duration` ticks
/// or more; shorter records are dropped. Sorted by (a, b).
inline std::vector<PairSummary> pair_summaries(std::span<const ContactRecord> records, Tick min_duration) {
  std::map<std::uint64_t, PairSummary> acc;
  for (const auto& r : records) {
    if (r.running_duration < min_duration) continue;
    auto [it, fresh] = acc.try_emplace(pair_key(r.a, r.b));
    PairSummary& s = it->second;
    if (fresh) s = {r.a, r.b, r.type_a, r.type_b, 0, 0, 0.0};
    ++s.contact_count;
    s.cumulative_duration += r.running_duration;
    s.distance_time += r.mean_distance() * static_cast<double>(r.running_duration);
  }
  std::vector<PairSummary> out;
  out.reserve(acc.size());
  for (auto& [_, s] : acc) out.push_back(s);
  return out;
}

inline std::vector<PairSummary> pair_summaries(const ContactLedger& ledger, Tick min_duration) {
  return pair_summaries(ledger.records(), min_duration);
}

enum class Metric { count, duration, distance, chunks, probability };
enum class Level { agent_agent, agent_type, type_type };

inline const char* to_string(Metric m) {
  switch (m) {
    case Metric::count: return "count";
    case Metric::duration: return "duration";
    case Metric::distance: return "distance";
    case Metric::chunks: return "chunks";
    case Metric::probability: return "probability";
  }
  return "?";
}

inline const char* to_string(Level l) {
  switch (l) {
    case Level::agent_agent: return "agent";
    case Level::agent_type: return "agent_type";
    case Level::type_type: return "type";
  }
  return "?";
}

struct ContactMatrix {
  Level level = Level::type_type;
  Metric metric = Metric::count;
  std::vector<std::string> row_labels;
  std::vector<std::string> col_labels;
  std::vector<std::optional<double>> values;  // row-major; empty optional = undefined

  ContactMatrix() = default;
  ContactMatrix(Level level, Metric metric, std::vector<std::string> rows, std::vector<std::string> cols)
      : level(level), metric(metric), row_labels(std::move(rows)), col_labels(std::move(cols)) {
    values.assign(row_labels.size() * col_labels.size(), 0.0);
  }

  std::size_t rows() const { return row_labels.size(); }
  std::size_t cols() const { return col_labels.size(); }
  std::optional<double>& at(std::size_t r, std::size_t c) { return values[r * cols() + c]; }
  const std::optional<double>& at(std::size_t r, std::size_t c) const { return values[r * cols() + c]; }

  friend bool operator==(const ContactMatrix&, const ContactMatrix&) = default;
};

namespace detail {

inline std::vector<std::string> agent_labels(const Roster& roster) {
  std::vector<std::string> out;
  out.reserve(roster.agents.size());
  for (AgentId id : roster.agents) out.push_back(std::to_string(id));
  return out;
}

inline std::size_t roster_index(const Roster& roster, AgentId id) {
  if (auto i = roster.index_of(id)) return *i;
  throw std::invalid_argument("agent " + std::to_string(id) + " is not in the roster");
}

inline void check_metric(Metric m) {
  if (m != Metric::count && m != Metric::duration && m != Metric::distance)
    throw std::invalid_argument("contact matrices are built for count, duration or distance");
}

// Running sums for one matrix cell.
struct CellSums {
  double count = 0.0;
  double duration = 0.0;
  double distance_time = 0.0;

  void add(const PairSummary& s) {
    count += static_cast<double>(s.contact_count);
    duration += static_cast<double>(s.cumulative_duration);
    distance_time += s.distance_time;
  }

  // `partners`: number of potential partners the sums are normalized by.
  std::optional<double> value(Metric m, double partners) const {
    if (!(partners > 0)) return std::nullopt;
    switch (m) {
      case Metric::count: return count / partners;
      case Metric::duration: return duration / partners;
      case Metric::distance: return duration > 0 ? distance_time / duration : 0.0;
      default: return std::nullopt;
    }
  }
};

}  // namespace detail

/// m x m matrix over every roster agent. Diagonal undefined; 0 for pairs never in contact.
inline ContactMatrix agent_matrix(std::span<const PairSummary> summaries, const Roster& roster, Metric metric) {
  detail::check_metric(metric);
  auto labels = detail::agent_labels(roster);
  ContactMatrix m(Level::agent_agent, metric, labels, labels);
  for (std::size_t i = 0; i < m.rows(); ++i) m.at(i, i).reset();
  for (const auto& s : summaries) {
    const auto i = detail::roster_index(roster, s.a);
    const auto j = detail::roster_index(roster, s.b);
    double v = 0.0;
    switch (metric) {
      case Metric::count: v = static_cast<double>(s.contact_count); break;
      case Metric::duration: v = static_cast<double>(s.cumulative_duration); break;
      default: v = s.weighted_mean_distance(); break;
    }
    m.at(i, j) = v;
    m.at(j, i) = v;
  }
  return m;
}

/// Rows are agents, columns are types. A host's cell for type T is normalized by
/// |T minus the host|; the distance cell is the duration-weighted mean over the
/// contacted members of T.
inline ContactMatrix agent_by_type(std::span<const PairSummary> summaries, const Roster& roster, Metric metric) {
  detail::check_metric(metric);
  const std::size_t n_types = roster.type_names.size();
  ContactMatrix m(Level::agent_type, metric, detail::agent_labels(roster), roster.type_names);
  std::vector<detail::CellSums> sums(m.rows() * n_types);
  for (const auto& s : summaries) {
    const auto i = detail::roster_index(roster, s.a);
    const auto j = detail::roster_index(roster, s.b);
    sums[i * n_types + s.type_b].add(s);
    sums[j * n_types + s.type_a].add(s);
  }
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t t = 0; t < n_types; ++t) {
      const auto partners = roster.populations[t] - (roster.agent_types[i] == t ? 1 : 0);
      m.at(i, t) = sums[i * n_types + t].value(metric, static_cast<double>(partners));
    }
  }
  return m;
}

/// n x n matrix over types. Symmetric by construction.
inline ContactMatrix type_matrix(std::span<const PairSummary> summaries, const Roster& roster, Metric metric) {
  detail::check_metric(metric);
  const std::size_t n = roster.type_names.size();
  ContactMatrix m(Level::type_type, metric, roster.type_names, roster.type_names);
  std::vector<detail::CellSums> sums(n * n);
  for (const auto& s : summaries) {
    const auto lo = std::min(s.type_a, s.type_b);
    const auto hi = std::max(s.type_a, s.type_b);
    if (hi >= n) throw std::invalid_argument("pair summary type index out of range");
    sums[lo * n + hi].add(s);
  }
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = a; b < n; ++b) {
      const auto na = static_cast<std::uint64_t>(std::max<std::int64_t>(0, roster.populations[a]));
      const auto nb = static_cast<std::uint64_t>(std::max<std::int64_t>(0, roster.populations[b]));
      // Within a type the ordered-pair sum is twice the unordered sum, over 2 * C(n, 2).
      const double partners = a == b ? static_cast<double>(choose2(na)) : static_cast<double>(na * nb);
      const auto v = sums[a * n + b].value(metric, partners);
      m.at(a, b) = v;
      m.at(b, a) = v;
    }
  }
  return m;
}

/// Multiplies count and duration cells by `factor`; distance cells are left alone.
inline ContactMatrix rescaled(ContactMatrix m, double factor) {
  if (m.metric == Metric::distance) return m;
  for (auto& v : m.values)
    if (v) *v *= factor;
  return m;
}

/// Cumulative in-contact ticks per type pair per time bucket.
struct HourlySeries {
  Tick bucket_length = 1;
  std::vector<std::pair<TypeIndex, TypeIndex>> type_pairs;  // (lo, hi), lexicographic
  std::vector<std::vector<Tick>> buckets;                   // parallel to type_pairs

  std::size_t bucket_count() const { return buckets.empty() ? 0 : buckets.front().size(); }
  friend bool operator==(const HourlySeries&, const HourlySeries&) = default;
};

/// Each tick a pair spends in contact adds 1 to bucket floor(tick / bucket_length)
/// of its type pair. Covers at least `horizon` ticks. Records shorter than
/// `min_duration` are skipped, matching pair_summaries.
inline HourlySeries hourly_series(std::span<const ContactRecord> records, std::size_t type_count,
                                  Tick bucket_length, Tick horizon = 0, Tick min_duration = 1) {
  if (bucket_length < 1) throw std::invalid_argument("bucket length must be at least 1 tick");
  Tick end = std::max<Tick>(horizon, 0);
  for (const auto& r : records) {
    if (r.start_tick < 0) throw std::invalid_argument("contact records must start at tick 0 or later");
    end = std::max(end, r.last_updated_tick + 1);
  }
  const auto n_buckets = static_cast<std::size_t>((end + bucket_length - 1) / bucket_length);
  HourlySeries out;
  out.bucket_length = bucket_length;
  std::vector<std::size_t> slot(type_count * type_count);
  for (std::size_t a = 0; a < type_count; ++a) {
    for (std::size_t b = a; b < type_count; ++b) {
      slot[a * type_count + b] = out.type_pairs.size();
      out.type_pairs.emplace_back(static_cast<TypeIndex>(a), static_cast<TypeIndex>(b));
    }
  }
  out.buckets.assign(out.type_pairs.size(), std::vector<Tick>(n_buckets, 0));
  for (const auto& r : records) {
    if (r.running_duration < min_duration) continue;
    const auto lo = std::min(r.type_a, r.type_b);
    const auto hi = std::max(r.type_a, r.type_b);
    if (hi >= type_count) throw std::invalid_argument("record type index out of range");
    auto& series = out.buckets[slot[lo * type_count + hi]];
    for (Tick s = r.start_tick; s <= r.last_updated_tick;) {
      const Tick bucket = s / bucket_length;
      const Tick bucket_end = std::min((bucket + 1) * bucket_length - 1, r.last_updated_tick);
      series[static_cast<std::size_t>(bucket)] += bucket_end - s + 1;
      s = bucket_end + 1;
    }
  }
  return out;
}

inline HourlySeries hourly_series(const ContactLedger& ledger, std::size_t type_count, Tick bucket_length,
                                  Tick horizon = 0, Tick min_duration = 1) {
  return hourly_series(ledger.records(), type_count, bucket_length, horizon, min_duration);
}

/// Durations expressed in multiples of one effective-contact length. Not floored.
inline double effective_chunks(double duration_ticks, Tick chunk_length) {
  if (chunk_length < 1) throw std::invalid_argument("chunk length must be at least 1 tick");
  return duration_ticks / static_cast<double>(chunk_length);
}

inline ContactMatrix effective_chunks(const ContactMatrix& durations, Tick chunk_length) {
  if (durations.metric != Metric::duration) throw std::invalid_argument("effective_chunks needs a duration matrix");
  ContactMatrix f = durations;
  f.metric = Metric::chunks;
  for (auto& v : f.values)
    if (v) *v = effective_chunks(*v, chunk_length);
  return f;
}

/// Compound probability of at least one transmission over `f` effective contacts,
/// each transmitting with probability `p`: 1 - (1 - p)^f.
inline double transmission_probability(double f, double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw std::domain_error("base probability must lie in [0, 1]");
  if (!(f >= 0.0)) throw std::domain_error("effective-contact frequency must be nonnegative");
  if (f == 0.0) return 0.0;
  if (p == 1.0) return 1.0;
  return -std::expm1(f * std::log1p(-p));
}

inline ContactMatrix transmission_probability(const ContactMatrix& f, double p) {
  if (f.metric != Metric::chunks) throw std::invalid_argument("transmission_probability needs a chunk matrix");
  ContactMatrix out = f;
  out.metric = Metric::probability;
  for (auto& v : out.values)
    if (v) *v = transmission_probability(*v, p);
  return out;
}

}  // namespace contactmix

#endif  // CONTACTMIX_AGGREGATE_HPP
