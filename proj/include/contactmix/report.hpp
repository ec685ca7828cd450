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

#ifndef CONTACTMIX_REPORT_HPP
#define CONTACTMIX_REPORT_HPP

// Output bundle: every matrix as CSV (labels in the first row and column, six
// significant digits, undefined cells left empty) plus a JSON document holding
// the same data at full precision with undefined cells as null.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "contactmix/aggregate.hpp"
#include "contactmix/contacts.hpp"

namespace contactmix {

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct AnalysisOptions {
  ContactConfig contact;
  double base_p = 0.05;
  Tick bucket_ticks = 3600;
  Tick horizon_ticks = 0;
  bool per_day = false;

  void validate() const {
    contact.validate();
    if (!(base_p >= 0.0 && base_p <= 1.0)) throw std::invalid_argument("base probability must lie in [0, 1]");
    if (bucket_ticks < 1) throw std::invalid_argument("bucket length must be at least 1 tick");
    if (horizon_ticks < 0) throw std::invalid_argument("horizon must be nonnegative");
    if (per_day && horizon_ticks == 0) throw std::invalid_argument("per-day rescaling needs a nonzero horizon");
  }

  /// Factor applied to count and duration matrices: 1, or seconds-per-day over horizon seconds.
  double scale() const {
    return per_day ? 86400.0 / (static_cast<double>(horizon_ticks) * contact.tick_length_s) : 1.0;
  }
};

struct Bundle {
  std::vector<PairSummary> pairs;
  std::vector<ContactMatrix> matrices;  // levels x metrics, level-major
  HourlySeries hourly;
  ContactMatrix chunks;
  ContactMatrix probability;

  const ContactMatrix& matrix(Level level, Metric metric) const {
    for (const auto& m : matrices)
      if (m.level == level && m.metric == metric) return m;
    throw std::out_of_range("no such matrix");
  }
};

inline constexpr Level kLevels[] = {Level::agent_agent, Level::agent_type, Level::type_type};
inline constexpr Metric kMetrics[] = {Metric::count, Metric::duration, Metric::distance};

inline Bundle analyze(const ContactLedger& ledger, const Roster& roster, const AnalysisOptions& options) {
  options.validate();
  Bundle b;
  b.pairs = pair_summaries(ledger, options.contact.min_duration_ticks);
  const double scale = options.scale();
  for (Level level : kLevels) {
    for (Metric metric : kMetrics) {
      ContactMatrix m;
      switch (level) {
        case Level::agent_agent: m = agent_matrix(b.pairs, roster, metric); break;
        case Level::agent_type: m = agent_by_type(b.pairs, roster, metric); break;
        case Level::type_type: m = type_matrix(b.pairs, roster, metric); break;
      }
      b.matrices.push_back(rescaled(std::move(m), scale));
    }
  }
  b.hourly = hourly_series(ledger, roster.type_names.size(), options.bucket_ticks, options.horizon_ticks,
                           options.contact.min_duration_ticks);
  b.chunks = effective_chunks(b.matrix(Level::type_type, Metric::duration), options.contact.chunk_ticks);
  b.probability = transmission_probability(b.chunks, options.base_p);
  return b;
}

/// printf("%.6g") formatting.
inline std::string format_cell(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

inline std::string matrix_csv(const ContactMatrix& m) {
  std::string out = m.level == Level::type_type ? "type" : "agent";
  for (const auto& c : m.col_labels) out += "," + c;
  out += '\n';
  for (std::size_t r = 0; r < m.rows(); ++r) {
    out += m.row_labels[r];
    for (std::size_t c = 0; c < m.cols(); ++c) {
      out += ',';
      if (const auto& v = m.at(r, c)) out += format_cell(*v);
    }
    out += '\n';
  }
  return out;
}

inline nlohmann::ordered_json matrix_json(const ContactMatrix& m) {
  using J = nlohmann::ordered_json;
  J values = J::array();
  for (std::size_t r = 0; r < m.rows(); ++r) {
    J row = J::array();
    for (std::size_t c = 0; c < m.cols(); ++c) {
      if (const auto& v = m.at(r, c))
        row.push_back(*v);
      else
        row.push_back(nullptr);
    }
    values.push_back(std::move(row));
  }
  return {{"level", to_string(m.level)}, {"metric", to_string(m.metric)}, {"rows", m.row_labels},
          {"cols", m.col_labels},        {"values", std::move(values)}};
}

inline std::string type_pair_label(const Roster& roster, std::pair<TypeIndex, TypeIndex> p) {
  return roster.type_names[p.first] + "|" + roster.type_names[p.second];
}

inline std::string hourly_csv(const HourlySeries& s, const Roster& roster) {
  std::string out = "bucket,start_tick";
  for (const auto& p : s.type_pairs) out += "," + type_pair_label(roster, p);
  out += '\n';
  for (std::size_t k = 0; k < s.bucket_count(); ++k) {
    out += std::to_string(k) + "," + std::to_string(static_cast<Tick>(k) * s.bucket_length);
    for (const auto& series : s.buckets) out += "," + std::to_string(series[k]);
    out += '\n';
  }
  return out;
}

inline std::string records_csv(const ContactLedger& ledger, const Roster& roster) {
  std::string out = "agent_a,agent_b,type_a,type_b,start_tick,last_updated_tick,duration_ticks,mean_distance_m\n";
  for (const auto& r : ledger.records()) {
    out += std::to_string(r.a) + "," + std::to_string(r.b) + "," + roster.type_names.at(r.type_a) + "," +
           roster.type_names.at(r.type_b) + "," + std::to_string(r.start_tick) + "," +
           std::to_string(r.last_updated_tick) + "," + std::to_string(r.running_duration) + "," +
           format_cell(r.mean_distance()) + "\n";
  }
  return out;
}

inline std::string pairs_csv(const std::vector<PairSummary>& pairs, const Roster& roster) {
  std::string out = "agent_a,agent_b,type_a,type_b,contact_count,duration_ticks,mean_distance_m\n";
  for (const auto& p : pairs) {
    out += std::to_string(p.a) + "," + std::to_string(p.b) + "," + roster.type_names.at(p.type_a) + "," +
           roster.type_names.at(p.type_b) + "," + std::to_string(p.contact_count) + "," +
           std::to_string(p.cumulative_duration) + "," + format_cell(p.weighted_mean_distance()) + "\n";
  }
  return out;
}

inline nlohmann::ordered_json options_json(const AnalysisOptions& o) {
  return {{"radius_m", o.contact.radius_m},
          {"tick_length_s", o.contact.tick_length_s},
          {"min_duration_ticks", o.contact.min_duration_ticks},
          {"chunk_ticks", o.contact.chunk_ticks},
          {"base_p", o.base_p},
          {"bucket_ticks", o.bucket_ticks},
          {"horizon_ticks", o.horizon_ticks},
          {"per_day", o.per_day}};
}

inline nlohmann::ordered_json bundle_json(const Bundle& b, const Roster& roster, const AnalysisOptions& options) {
  using J = nlohmann::ordered_json;
  J matrices = J::object();
  for (const auto& m : b.matrices) matrices[to_string(m.level)][to_string(m.metric)] = matrix_json(m);
  J series = J::object();
  for (std::size_t k = 0; k < b.hourly.type_pairs.size(); ++k)
    series[type_pair_label(roster, b.hourly.type_pairs[k])] = b.hourly.buckets[k];
  return {{"config", options_json(options)},
          {"types", roster.type_names},
          {"populations", roster.populations},
          {"matrices", std::move(matrices)},
          {"hourly_series", {{"bucket_ticks", b.hourly.bucket_length}, {"series", std::move(series)}}},
          {"effective_chunks", matrix_json(b.chunks)},
          {"transmission_probability", matrix_json(b.probability)}};
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << text;
  out.close();
  if (!out) throw IoError("failed writing " + path.string());
}

inline std::string matrix_file_name(const ContactMatrix& m) {
  return std::string("matrix_") + to_string(m.level) + "_" + to_string(m.metric) + ".csv";
}

/// Writes the bundle files into `dir`, which must exist.
inline void write_bundle(const std::filesystem::path& dir, const Bundle& b, const ContactLedger& ledger,
                         const Roster& roster, const AnalysisOptions& options) {
  for (const auto& m : b.matrices) write_text(dir / matrix_file_name(m), matrix_csv(m));
  write_text(dir / "effective_chunks.csv", matrix_csv(b.chunks));
  write_text(dir / "transmission_probability.csv", matrix_csv(b.probability));
  write_text(dir / "hourly_series.csv", hourly_csv(b.hourly, roster));
  write_text(dir / "contact_records.csv", records_csv(ledger, roster));
  write_text(dir / "pair_summaries.csv", pairs_csv(b.pairs, roster));
  write_text(dir / "bundle.json", bundle_json(b, roster, options).dump(2) + "\n");
}

}  // namespace contactmix

#endif  // CONTACTMIX_REPORT_HPP
