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

#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <map>
#include <vector>

#include "contactmix/aggregate.hpp"
#include "contactmix/engine.hpp"
#include "contactmix/trace.hpp"
#include "test_support.hpp"

namespace contactmix {
namespace {

enum : AgentId { H = 0, G1, G2, Y1, Y2, B1, B2, B3 };
enum : std::size_t { kH = 0, kG, kY, kB };

Roster golden_roster() {
  Roster r;
  r.type_names = {"H", "G", "Y", "B"};
  r.populations = {1, 2, 2, 3};
  r.agents = {H, G1, G2, Y1, Y2, B1, B2, B3};
  r.agent_types = {0, 1, 1, 2, 2, 3, 3, 3};
  return r;
}

ContactLedger golden_ledger() {
  std::ifstream in(testing::fixture("golden_trace.csv"));
  TraceReader reader(in);
  ContactLedger ledger;
  while (auto f = reader.next()) ledger.observe_tick(*f, 2.0);
  ledger.finalize();
  return ledger;
}

const PairSummary& summary_of(const std::vector<PairSummary>& s, AgentId a, AgentId b) {
  for (const auto& p : s)
    if (p.a == a && p.b == b) return p;
  throw std::out_of_range("pair not found");
}

TEST(MaxUniqueContacts, SmallCase) { EXPECT_EQ(max_unique_contacts(2, 3), 10); }

TEST(MaxUniqueContacts, EqualsPairsOfTheUnion) {
  for (std::int64_t a = 0; a <= 50; ++a)
    for (std::int64_t b = 0; b <= 50; ++b) EXPECT_EQ(max_unique_contacts(a, b), (a + b) * (a + b - 1) / 2);
}

TEST(PairSummaries, HostRowOfTheWorkedExample) {
  const auto s = pair_summaries(golden_ledger(), 1);
  struct Row {
    AgentId other;
    std::int64_t count;
    Tick duration;
    double distance;
  };
  for (const Row& row : {Row{G2, 1, 3, 1.70}, Row{Y1, 2, 2, 1.00}, Row{B1, 1, 2, 0.90}, Row{B3, 1, 2, 1.80}}) {
    const auto& p = summary_of(s, H, row.other);
    EXPECT_EQ(p.contact_count, row.count) << row.other;
    EXPECT_EQ(p.cumulative_duration, row.duration) << row.other;
    EXPECT_NEAR(p.weighted_mean_distance(), row.distance, 1e-12) << row.other;
  }
  // Agents H never met have no summary at all.
  for (AgentId other : {G1, Y2, B2})
    EXPECT_THROW(summary_of(s, H, other), std::out_of_range);
}

TEST(PairSummaries, MinimumDurationFilter) {
  const auto s = pair_summaries(golden_ledger(), 2);
  // H-Y1 had two one-tick sessions; both go.
  EXPECT_THROW(summary_of(s, H, Y1), std::out_of_range);
  EXPECT_EQ(summary_of(s, H, G2).cumulative_duration, 3);
  for (const auto& p : s) EXPECT_GE(p.cumulative_duration, 2);
}

TEST(AgentByType, HostRowOfTheWorkedExample) {
  const auto s = pair_summaries(golden_ledger(), 1);
  const Roster r = golden_roster();
  const auto count = agent_by_type(s, r, Metric::count);
  const auto dur = agent_by_type(s, r, Metric::duration);
  const auto dist = agent_by_type(s, r, Metric::distance);
  EXPECT_NEAR(*count.at(H, kG), 0.5, 0.01);
  EXPECT_NEAR(*count.at(H, kY), 1.0, 0.01);
  EXPECT_NEAR(*count.at(H, kB), 0.67, 0.01);
  EXPECT_NEAR(*dur.at(H, kG), 1.5, 0.01);
  EXPECT_NEAR(*dur.at(H, kY), 1.0, 0.01);
  EXPECT_NEAR(*dur.at(H, kB), 1.33, 0.01);
  // The green mean distance is the host-G2 value of 1.70, not 1.75.
  EXPECT_NEAR(*dist.at(H, kG), 1.70, 1e-12);
  EXPECT_NEAR(*dist.at(H, kY), 1.00, 0.01);
  EXPECT_NEAR(*dist.at(H, kB), 1.35, 1e-12);
  // Only one H: no own-type partners.
  EXPECT_FALSE(count.at(H, kH).has_value());
  EXPECT_FALSE(dur.at(H, kH).has_value());
}

TEST(AgentByType, OwnTypeDenominatorExcludesSelf) {
  const auto s = pair_summaries(golden_ledger(), 1);
  const auto dur = agent_by_type(s, golden_roster(), Metric::duration);
  // B1 met B2 for one tick; B1 has two other blues.
  EXPECT_DOUBLE_EQ(*dur.at(B1, kB), 0.5);
  EXPECT_DOUBLE_EQ(*dur.at(G1, kG), 0.0);
}

TEST(TypeMatrix, DurationsOfTheWorkedExample) {
  const auto s = pair_summaries(golden_ledger(), 1);
  const auto m = type_matrix(s, golden_roster(), Metric::duration);
  const double table[4][4] = {{NAN, 1.5, 1, 1.33}, {1.5, 0, 0.75, 1.17}, {1, 0.75, 0, 0.33}, {1.33, 1.17, 0.33, 0.34}};
  EXPECT_FALSE(m.at(kH, kH).has_value());
  for (std::size_t i = 0; i < 4; ++i) {
    for (std::size_t j = 0; j < 4; ++j) {
      if (i == kH && j == kH) continue;
      ASSERT_TRUE(m.at(i, j).has_value());
      EXPECT_NEAR(*m.at(i, j), table[i][j], 0.01) << i << "," << j;
    }
  }
  EXPECT_DOUBLE_EQ(*m.at(kB, kB), 1.0 / 3.0);
}

TEST(TypeMatrix, GoldenCountsAndDistances) {
  const auto s = pair_summaries(golden_ledger(), 1);
  const auto count = type_matrix(s, golden_roster(), Metric::count);
  const auto dist = type_matrix(s, golden_roster(), Metric::distance);
  EXPECT_NEAR(*count.at(kH, kB), 2.0 / 3.0, 1e-12);
  EXPECT_NEAR(*dist.at(kH, kB), 1.35, 1e-12);
  // No green-green contact: count 0, distance 0 by convention.
  EXPECT_EQ(*count.at(kG, kG), 0.0);
  EXPECT_EQ(*dist.at(kG, kG), 0.0);
}

TEST(TypeMatrix, UnknownTypesAreRejected) {
  auto s = pair_summaries(golden_ledger(), 1);
  s.back().type_b = 4;
  EXPECT_THROW(type_matrix(s, golden_roster(), Metric::count), std::invalid_argument);
}

TEST(AgentMatrix, UnknownAgentsAreRejected) {
  auto s = pair_summaries(golden_ledger(), 1);
  Roster r = golden_roster();
  r.agents.pop_back();
  r.agent_types.pop_back();
  EXPECT_THROW(agent_matrix(s, r, Metric::count), std::invalid_argument);
  EXPECT_THROW(agent_by_type(s, r, Metric::count), std::invalid_argument);
}

TEST(HourlySeries, SplitsAcrossBucketBoundary) {
  ContactRecord r{0, 1, 0, 1, 55, 64, 10, 10.0, false};
  const std::vector<ContactRecord> records{r};
  const auto h = hourly_series(records, 2, 60);
  ASSERT_EQ(h.type_pairs.size(), 3u);
  const std::size_t slot = 1;  // (0, 1)
  EXPECT_EQ(h.type_pairs[slot], (std::pair<TypeIndex, TypeIndex>{0, 1}));
  EXPECT_EQ(h.buckets[slot], (std::vector<Tick>{5, 5}));
  EXPECT_EQ(h.buckets[0], (std::vector<Tick>{0, 0}));
  EXPECT_EQ(hourly_series(records, 2, 60, 600).bucket_count(), 10u);
}

TEST(EffectiveChunks, NotFloored) {
  EXPECT_DOUBLE_EQ(effective_chunks(1800.0, 900), 2.0);
  EXPECT_DOUBLE_EQ(effective_chunks(1350.0, 900), 1.5);
  EXPECT_THROW(effective_chunks(1.0, 0), std::invalid_argument);
}

TEST(TransmissionProbability, KnownValuesAndDomain) {
  EXPECT_NEAR(transmission_probability(2.0, 0.1), 0.19, 1e-15);
  EXPECT_EQ(transmission_probability(0.0, 0.7), 0.0);
  EXPECT_EQ(transmission_probability(3.0, 0.0), 0.0);
  EXPECT_EQ(transmission_probability(0.5, 1.0), 1.0);
  EXPECT_NEAR(transmission_probability(1.0, 0.3), 0.3, 1e-15);
  EXPECT_THROW(transmission_probability(1.0, -0.1), std::domain_error);
  EXPECT_THROW(transmission_probability(1.0, 1.1), std::domain_error);
  EXPECT_THROW(transmission_probability(-1.0, 0.5), std::domain_error);
  EXPECT_THROW(transmission_probability(NAN, 0.5), std::domain_error);
  EXPECT_THROW(transmission_probability(1.0, NAN), std::domain_error);
  EXPECT_LT(transmission_probability(10.0, 0.5), 1.0);
}

TEST(TransmissionProbability, MatrixKeepsUndefinedCells) {
  const auto s = pair_summaries(golden_ledger(), 1);
  const auto f = effective_chunks(type_matrix(s, golden_roster(), Metric::duration), 1);
  const auto p = transmission_probability(f, 0.1);
  EXPECT_FALSE(p.at(kH, kH).has_value());
  EXPECT_NEAR(*p.at(kH, kG), 1.0 - std::pow(0.9, 1.5), 1e-12);
  EXPECT_THROW(transmission_probability(type_matrix(s, golden_roster(), Metric::duration), 0.1),
               std::invalid_argument);
}

TEST(Rescaled, LeavesDistanceAlone) {
  const auto s = pair_summaries(golden_ledger(), 1);
  const auto dur = rescaled(type_matrix(s, golden_roster(), Metric::duration), 24.0);
  const auto dist = rescaled(type_matrix(s, golden_roster(), Metric::distance), 24.0);
  EXPECT_NEAR(*dur.at(kH, kG), 36.0, 1e-12);
  EXPECT_NEAR(*dist.at(kH, kG), 1.70, 1e-12);
  EXPECT_FALSE(dur.at(kH, kH).has_value());
}

// Properties over simulated runs -------------------------------------------

struct SimulatedRun {
  Roster roster;
  ContactLedger ledger;
  Tick horizon;
};

SimulatedRun simulate(std::uint64_t seed) {
  const Scenario s = parse_scenario(testing::random_scenario(seed, {.agents = 60, .horizon_s = 500}));
  SimConfig cfg;
  cfg.horizon = 500;
  cfg.seed = seed;
  SimulatedRun out{Roster::from_scenario(s), {}, cfg.horizon};
  run(s, cfg, [&](const TickFrame& f) { out.ledger.observe_tick(f, 2.0); });
  out.ledger.finalize();
  return out;
}

class SimulatedProperties : public ::testing::TestWithParam<std::uint64_t> {};

TEST_P(SimulatedProperties, CrossTypeCellsConserveRawSums) {
  const auto r = simulate(GetParam());
  const auto s = pair_summaries(r.ledger, 1);
  const std::size_t n = r.roster.type_names.size();
  // Raw sums straight from the records.
  std::vector<double> count(n * n), dur(n * n), dist_time(n * n);
  for (const auto& rec : r.ledger.records()) {
    const auto ta = r.roster.agent_types[rec.a], tb = r.roster.agent_types[rec.b];
    for (auto [x, y] : {std::pair{ta, tb}, std::pair{tb, ta}}) {
      count[x * n + y] += 1;
      dur[x * n + y] += static_cast<double>(rec.running_duration);
      dist_time[x * n + y] += rec.distance_sum;
      if (ta == tb) break;
    }
  }
  const auto mc = type_matrix(s, r.roster, Metric::count);
  const auto md = type_matrix(s, r.roster, Metric::duration);
  const auto mx = type_matrix(s, r.roster, Metric::distance);
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = 0; b < n; ++b) {
      const double na = static_cast<double>(r.roster.populations[a]);
      const double nb = static_cast<double>(r.roster.populations[b]);
      const double partners = a == b ? na * (na - 1) / 2 : na * nb;
      if (partners == 0) continue;
      // Integer sums: the cell is exactly their correctly rounded quotient.
      EXPECT_EQ(*mc.at(a, b), count[a * n + b] / partners);
      EXPECT_EQ(*md.at(a, b), dur[a * n + b] / partners);
      if (dur[a * n + b] > 0) {
        EXPECT_NEAR(*mx.at(a, b), dist_time[a * n + b] / dur[a * n + b], 1e-9);
      }
    }
  }
}

TEST_P(SimulatedProperties, TypeRowsAreMeansOfAgentRows) {
  const auto r = simulate(GetParam());
  const auto s = pair_summaries(r.ledger, 1);
  for (Metric metric : {Metric::count, Metric::duration}) {
    const auto per_agent = agent_by_type(s, r.roster, metric);
    const auto per_type = type_matrix(s, r.roster, metric);
    const std::size_t n = r.roster.type_names.size();
    for (std::size_t a = 0; a < n; ++a) {
      for (std::size_t b = 0; b < n; ++b) {
        double sum = 0;
        int members = 0;
        for (std::size_t i = 0; i < r.roster.agents.size(); ++i) {
          if (r.roster.agent_types[i] != a) continue;
          if (auto v = per_agent.at(i, b)) sum += *v;
          ++members;
        }
        if (!per_type.at(a, b)) continue;
        EXPECT_NEAR(sum / members, *per_type.at(a, b), 1e-9) << a << "," << b;
      }
    }
  }
}

TEST_P(SimulatedProperties, RaisingMinimumDurationNeverIncreasesCells) {
  const auto r = simulate(GetParam());
  for (Metric metric : {Metric::count, Metric::duration}) {
    for (Level level : {Level::agent_agent, Level::agent_type, Level::type_type}) {
      ContactMatrix prev;
      for (Tick tau = 1; tau <= 30; tau += 4) {
        const auto s = pair_summaries(r.ledger, tau);
        ContactMatrix m = level == Level::agent_agent  ? agent_matrix(s, r.roster, metric)
                          : level == Level::agent_type ? agent_by_type(s, r.roster, metric)
                                                       : type_matrix(s, r.roster, metric);
        if (tau > 1) {
          for (std::size_t k = 0; k < m.values.size(); ++k) {
            ASSERT_EQ(m.values[k].has_value(), prev.values[k].has_value());
            if (m.values[k]) {
              EXPECT_LE(*m.values[k], *prev.values[k]);
            }
          }
        }
        prev = m;
      }
    }
  }
}

TEST_P(SimulatedProperties, HourlySeriesConservesDuration) {
  const auto r = simulate(GetParam());
  for (Tick bucket : {1, 7, 60, 1000}) {
    const auto h = hourly_series(r.ledger, r.roster.type_names.size(), bucket, r.horizon);
    Tick total = 0;
    for (const auto& series : h.buckets)
      for (Tick v : series) total += v;
    Tick expected = 0;
    for (const auto& rec : r.ledger.records()) expected += rec.running_duration;
    EXPECT_EQ(total, expected);
  }
}

TEST_P(SimulatedProperties, MatricesAreSymmetric) {
  const auto r = simulate(GetParam());
  const auto s = pair_summaries(r.ledger, 1);
  for (Metric metric : {Metric::count, Metric::duration, Metric::distance}) {
    for (const auto& m : {type_matrix(s, r.roster, metric), agent_matrix(s, r.roster, metric)}) {
      for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) ASSERT_EQ(m.at(i, j), m.at(j, i));
    }
  }
}

INSTANTIATE_TEST_SUITE_P(Seeds, SimulatedProperties, ::testing::Values(3u, 4u, 5u));

}  // namespace
}  // namespace contactmix
