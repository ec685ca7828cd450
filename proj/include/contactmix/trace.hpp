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

#ifndef CONTACTMIX_TRACE_HPP
#define CONTACTMIX_TRACE_HPP

// Frame-stream text format, one agent per line:
//
//   tick,agent_id,type_name,x_m,y_m
//
// The header line is optional. Ticks start at 0 and increase by exactly one
// from one group of lines to the next. A tick with no agents present is
// written as "tick,,,," so that the tick sequence stays dense.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>
#include <unordered_map>
#include <vector>

#include "contactmix/frame.hpp"
#include "contactmix/geometry.hpp"

namespace contactmix {

inline constexpr std::string_view kTraceHeader = "tick,agent_id,type_name,x_m,y_m";

class TraceError : public std::runtime_error {
 public:
  TraceError(std::size_t line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line(line) {}
  std::size_t line;
};

/// Streams frames out of a trace. Type names are assigned indices in order of
/// first appearance unless a fixed list is given, in which case unknown names
/// are rejected.
class TraceReader {
 public:
  explicit TraceReader(std::istream& in, std::optional<std::vector<std::string>> fixed_types = std::nullopt)
      : in_(in), fixed_(fixed_types.has_value()) {
    if (fixed_types) {
      for (auto& name : *fixed_types) intern_type(name, 0);
    }
  }

  /// Next frame, or nullopt at end of input.
  std::optional<TickFrame> next() {
    if (!pending_ && !read_line()) return std::nullopt;
    TickFrame frame;
    frame.tick = pending_->tick;
    const Tick expected = last_tick_ ? *last_tick_ + 1 : 0;
    if (frame.tick != expected)
      throw TraceError(pending_line_, "expected tick " + std::to_string(expected) + ", got " +
                                          std::to_string(frame.tick));
    std::size_t empty_markers = 0;
    while (pending_ && pending_->tick == frame.tick) {
      if (pending_->entry)
        frame.entries.push_back(*pending_->entry);
      else
        ++empty_markers;
      if (!read_line()) break;
    }
    if (pending_ && pending_->tick < frame.tick)
      throw TraceError(pending_line_, "tick " + std::to_string(pending_->tick) + " goes backwards");
    if (empty_markers > 0 && !frame.entries.empty())
      throw TraceError(line_no_, "tick " + std::to_string(frame.tick) + " has both agents and an empty marker");
    std::sort(frame.entries.begin(), frame.entries.end(),
              [](const FrameEntry& a, const FrameEntry& b) { return a.id < b.id; });
    for (std::size_t i = 1; i < frame.entries.size(); ++i) {
      if (frame.entries[i].id == frame.entries[i - 1].id)
        throw TraceError(line_no_, "agent " + std::to_string(frame.entries[i].id) + " appears twice in tick " +
                                       std::to_string(frame.tick));
    }
    last_tick_ = frame.tick;
    return frame;
  }

  const std::vector<std::string>& type_names() const { return type_names_; }

  /// Type of every agent seen so far.
  const std::unordered_map<AgentId, TypeIndex>& agent_types() const { return agent_types_; }

 private:
  struct Parsed {
    Tick tick;
    std::optional<FrameEntry> entry;
  };

  TypeIndex intern_type(const std::string& name, std::size_t line) {
    for (std::size_t i = 0; i < type_names_.size(); ++i)
      if (type_names_[i] == name) return static_cast<TypeIndex>(i);
    if (fixed_ && line != 0) throw TraceError(line, "unknown agent type '" + name + "'");
    type_names_.push_back(name);
    return static_cast<TypeIndex>(type_names_.size() - 1);
  }

  template <class T>
  static std::optional<T> parse_number(std::string_view s) {
    T value{};
    const auto* end = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(s.data(), end, value);
    if (ec != std::errc() || ptr != end) return std::nullopt;
    return value;
  }

  bool read_line() {
    pending_.reset();
    std::string line;
    while (std::getline(in_, line)) {
      ++line_no_;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty()) continue;
      if (line_no_ == 1 && line == kTraceHeader) continue;
      pending_ = parse(line);
      pending_line_ = line_no_;
      return true;
    }
    return false;
  }

  Parsed parse(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    for (;;) {
      const auto comma = line.find(',', start);
      fields.push_back(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    if (fields.size() != 5) throw TraceError(line_no_, "expected 5 comma-separated fields");
    const auto tick = parse_number<Tick>(fields[0]);
    if (!tick || *tick < 0) throw TraceError(line_no_, "bad tick '" + std::string(fields[0]) + "'");
    if (fields[1].empty() && fields[2].empty() && fields[3].empty() && fields[4].empty()) return {*tick, {}};
    const auto id = parse_number<AgentId>(fields[1]);
    if (!id) throw TraceError(line_no_, "bad agent id '" + std::string(fields[1]) + "'");
    if (fields[2].empty()) throw TraceError(line_no_, "missing type name");
    const auto x = parse_number<double>(fields[3]);
    const auto y = parse_number<double>(fields[4]);
    if (!x || !y || !std::isfinite(*x) || !std::isfinite(*y))
      throw TraceError(line_no_, "bad coordinates '" + std::string(fields[3]) + "," + std::string(fields[4]) + "'");
    const TypeIndex type = intern_type(std::string(fields[2]), line_no_);
    auto [it, fresh] = agent_types_.try_emplace(*id, type);
    if (!fresh && it->second != type)
      throw TraceError(line_no_, "agent " + std::to_string(*id) + " changes type from '" +
                                     type_names_[it->second] + "' to '" + type_names_[type] + "'");
    return {*tick, FrameEntry{*id, type, {*x, *y}}};
  }

  std::istream& in_;
  bool fixed_ = false;
  std::vector<std::string> type_names_;
  std::unordered_map<AgentId, TypeIndex> agent_types_;
  std::optional<Parsed> pending_;
  std::size_t pending_line_ = 0;
  std::size_t line_no_ = 0;
  std::optional<Tick> last_tick_;
};

/// Shortest decimal form that reads back to the same double.
inline std::string format_exact(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

class FrameWriter {
 public:
  FrameWriter(std::ostream& out, std::vector<std::string> type_names)
      : out_(out), type_names_(std::move(type_names)) {
    out_ << kTraceHeader << '\n';
  }

  void write(const TickFrame& frame) {
    if (frame.entries.empty()) {
      out_ << frame.tick << ",,,,\n";
      return;
    }
    for (const auto& e : frame.entries) {
      out_ << frame.tick << ',' << e.id << ',' << type_names_.at(e.type) << ',' << format_exact(e.position.x) << ','
           << format_exact(e.position.y) << '\n';
    }
  }

  void operator()(const TickFrame& frame) { write(frame); }

 private:
  std::ostream& out_;
  std::vector<std::string> type_names_;
};

}  // namespace contactmix

#endif  // CONTACTMIX_TRACE_HPP
