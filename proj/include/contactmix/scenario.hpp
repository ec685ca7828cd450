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

#ifndef CONTACTMIX_SCENARIO_HPP
#define CONTACTMIX_SCENARIO_HPP

// Declarative description of a setting: a grid map with named locations, the
// agent types that populate it, their arrival schedules and their workflows.
// The JSON schema is documented in docs/scenario-format.md.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"

#include "contactmix/geometry.hpp"
#include "contactmix/random.hpp"

namespace contactmix {

using Json = nlohmann::ordered_json;

class ScenarioError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A random quantity, in seconds for durations or m/s for speeds.
struct Distribution {
  enum class Kind { constant, uniform, triangular, exponential };

  Kind kind = Kind::constant;
  // constant: a. uniform: [a, b]. triangular: min a, mode b, max c. exponential: mean a.
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;

  static Distribution constant(double value) { return {Kind::constant, value, 0.0, 0.0}; }
  static Distribution uniform(double lo, double hi) { return {Kind::uniform, lo, hi, 0.0}; }
  static Distribution triangular(double lo, double mode, double hi) {
    return {Kind::triangular, lo, mode, hi};
  }
  static Distribution exponential(double mean) { return {Kind::exponential, mean, 0.0, 0.0}; }

  double mean() const {
    switch (kind) {
      case Kind::constant: return a;
      case Kind::uniform: return 0.5 * (a + b);
      case Kind::triangular: return (a + b + c) / 3.0;
      case Kind::exponential: return a;
    }
    return a;
  }

  double sample(RandomStream& stream) const {
    switch (kind) {
      case Kind::constant: return a;
      case Kind::uniform: return stream.uniform(a, b);
      case Kind::triangular: {
        if (c <= a) return a;
        const double u = stream.uniform01();
        const double split = (b - a) / (c - a);
        if (u < split) return a + std::sqrt(u * (c - a) * (b - a));
        return c - std::sqrt((1.0 - u) * (c - a) * (c - b));
      }
      case Kind::exponential: return -a * std::log1p(-stream.uniform01());
    }
    return a;
  }

  friend bool operator==(const Distribution&, const Distribution&) = default;
};

using DurationDistribution = Distribution;

/// Draws a duration and converts it to a nonnegative tick count (half-up rounding).
inline Tick sample_duration(const DurationDistribution& d, RandomStream& stream, double tick_length_s) {
  return std::max<Tick>(0, seconds_to_ticks(d.sample(stream), tick_length_s));
}

struct WorkflowStep {
  enum class Kind { go_to, dwell, queue, cycle, depart };

  Kind kind = Kind::depart;
  std::size_t location = 0;          // go_to, queue
  DurationDistribution duration;     // dwell
  std::vector<WorkflowStep> body;    // cycle
  std::optional<std::int64_t> repeat;  // cycle: iteration count
  std::optional<double> until_s;     // cycle: no new iteration starts at or after this time

  static WorkflowStep go_to(std::size_t loc) { return {Kind::go_to, loc, {}, {}, {}, {}}; }
  static WorkflowStep queue(std::size_t loc) { return {Kind::queue, loc, {}, {}, {}, {}}; }
  static WorkflowStep dwell(DurationDistribution d) { return {Kind::dwell, 0, d, {}, {}, {}}; }
  static WorkflowStep depart() { return {}; }
  static WorkflowStep cycle(std::vector<WorkflowStep> steps, std::optional<std::int64_t> repeat,
                            std::optional<double> until_s = std::nullopt) {
    return {Kind::cycle, 0, {}, std::move(steps), repeat, until_s};
  }

  friend bool operator==(const WorkflowStep&, const WorkflowStep&) = default;
};

struct Location {
  std::string name;
  std::vector<Cell> cells;
  std::optional<std::int64_t> capacity;  // empty: unlimited
  Cell anchor;

  bool contains(Cell c) const { return std::find(cells.begin(), cells.end(), c) != cells.end(); }
  friend bool operator==(const Location&, const Location&) = default;
};

struct EnvironmentMap {
  double cell_size_m = 0.5;
  int width = 1;
  int height = 1;
  std::vector<std::uint8_t> walkable_cells;  // row-major, 1 = walkable
  std::vector<Location> locations;

  static EnvironmentMap open(int width, int height, double cell_size_m = 0.5) {
    EnvironmentMap m;
    m.cell_size_m = cell_size_m;
    m.width = width;
    m.height = height;
    m.walkable_cells.assign(static_cast<std::size_t>(width) * height, 1);
    return m;
  }

  bool in_bounds(Cell c) const { return c.x >= 0 && c.y >= 0 && c.x < width && c.y < height; }
  std::size_t index(Cell c) const { return static_cast<std::size_t>(c.y) * width + c.x; }
  bool walkable(Cell c) const { return in_bounds(c) && walkable_cells[index(c)] != 0; }
  void set_blocked(Cell c, bool blocked = true) { walkable_cells[index(c)] = blocked ? 0 : 1; }

  Cell cell_of(Vec2 p) const {
    return {static_cast<int>(std::floor(p.x / cell_size_m)),
            static_cast<int>(std::floor(p.y / cell_size_m))};
  }
  bool walkable(Vec2 p) const {
    if (!(p.x >= 0.0 && p.y >= 0.0)) return false;
    return walkable(cell_of(p));
  }
  Vec2 center(Cell c) const { return {(c.x + 0.5) * cell_size_m, (c.y + 0.5) * cell_size_m}; }

  std::optional<std::size_t> find_location(std::string_view name) const {
    for (std::size_t i = 0; i < locations.size(); ++i)
      if (locations[i].name == name) return i;
    return std::nullopt;
  }

  friend bool operator==(const EnvironmentMap&, const EnvironmentMap&) = default;
};

struct AgentTypeSpec {
  std::string name;
  std::int64_t population = 0;
  std::size_t spawn = 0;           // location where agents appear on arrival
  std::vector<double> arrival_s;   // one entry per agent
  Distribution desired_speed = Distribution::uniform(1.2, 1.5);
  double radius_m = 0.25;
  std::vector<WorkflowStep> workflow;

  friend bool operator==(const AgentTypeSpec&, const AgentTypeSpec&) = default;
};

/// Run parameters a scenario file may carry. Command-line flags take precedence.
struct ScenarioDefaults {
  double tick_length_s = 1.0;
  std::optional<Tick> horizon_ticks;
  std::optional<std::uint64_t> seed;
  std::optional<double> radius_m;
  std::optional<Tick> min_duration_ticks;
  std::optional<Tick> chunk_ticks;
  std::optional<double> base_p;

  friend bool operator==(const ScenarioDefaults&, const ScenarioDefaults&) = default;
};

struct Scenario {
  EnvironmentMap map;
  std::vector<AgentTypeSpec> agent_types;
  ScenarioDefaults defaults;

  std::int64_t total_population() const {
    std::int64_t n = 0;
    for (const auto& t : agent_types) n += t.population;
    return n;
  }

  std::vector<std::int64_t> populations() const {
    std::vector<std::int64_t> out;
    for (const auto& t : agent_types) out.push_back(t.population);
    return out;
  }

  std::vector<std::string> type_names() const {
    std::vector<std::string> out;
    for (const auto& t : agent_types) out.push_back(t.name);
    return out;
  }

  /// Type of every agent. Ids are assigned consecutively in type order.
  std::vector<TypeIndex> roster() const {
    std::vector<TypeIndex> out;
    for (std::size_t t = 0; t < agent_types.size(); ++t)
      out.insert(out.end(), static_cast<std::size_t>(agent_types[t].population), static_cast<TypeIndex>(t));
    return out;
  }

  friend bool operator==(const Scenario&, const Scenario&) = default;
};

namespace detail {

[[noreturn]] inline void fail(const std::string& path, const std::string& what) {
  throw ScenarioError(path + ": " + what);
}

inline void check_keys(const Json& obj, const std::string& path,
                       std::initializer_list<std::string_view> allowed) {
  if (!obj.is_object()) fail(path, "expected an object");
  for (const auto& [key, _] : obj.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
      fail(path, "unknown key '" + key + "'");
  }
}

inline const Json& require(const Json& obj, const std::string& path, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end()) fail(path, std::string("missing key '") + key + "'");
  return *it;
}

inline double as_number(const Json& v, const std::string& path) {
  if (!v.is_number()) fail(path, "expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) fail(path, "expected a finite number");
  return x;
}

inline std::int64_t as_integer(const Json& v, const std::string& path) {
  if (!v.is_number_integer()) fail(path, "expected an integer");
  return v.get<std::int64_t>();
}

inline std::string as_string(const Json& v, const std::string& path) {
  if (!v.is_string()) fail(path, "expected a string");
  return v.get<std::string>();
}

inline Cell as_cell(const Json& v, const std::string& path) {
  if (!v.is_array() || v.size() != 2) fail(path, "expected a cell [x, y]");
  const auto x = as_integer(v[0], path);
  const auto y = as_integer(v[1], path);
  if (x < std::numeric_limits<int>::min() || x > std::numeric_limits<int>::max() ||
      y < std::numeric_limits<int>::min() || y > std::numeric_limits<int>::max())
    fail(path, "cell coordinate out of range");
  return {static_cast<int>(x), static_cast<int>(y)};
}

// [x0, y0, x1, y1], inclusive on both corners.
inline std::vector<Cell> as_rect(const Json& v, const std::string& path) {
  if (!v.is_array() || v.size() != 4) fail(path, "expected a rectangle [x0, y0, x1, y1]");
  const Cell lo = as_cell(Json::array({v[0], v[1]}), path);
  const Cell hi = as_cell(Json::array({v[2], v[3]}), path);
  if (hi.x < lo.x || hi.y < lo.y) fail(path, "rectangle corners out of order");
  if (static_cast<std::int64_t>(hi.x - lo.x + 1) * (hi.y - lo.y + 1) > 100'000'000)
    fail(path, "rectangle too large");
  std::vector<Cell> out;
  for (int y = lo.y; y <= hi.y; ++y)
    for (int x = lo.x; x <= hi.x; ++x) out.push_back({x, y});
  return out;
}

inline Distribution parse_distribution(const Json& v, const std::string& path) {
  if (v.is_number()) return Distribution::constant(as_number(v, path));
  if (!v.is_object() || v.size() != 1)
    fail(path, "expected a number or one of {constant, uniform, triangular, exponential}");
  const auto& [key, arg] = *v.items().begin();
  const std::string p = path + "." + key;
  Distribution d;
  auto params = [&](std::size_t n) {
    if (!arg.is_array() || arg.size() != n) fail(p, "expected " + std::to_string(n) + " parameters");
    std::vector<double> out;
    for (std::size_t i = 0; i < n; ++i) out.push_back(as_number(arg[i], p));
    return out;
  };
  if (key == "constant") {
    d = Distribution::constant(as_number(arg, p));
  } else if (key == "uniform") {
    const auto q = params(2);
    d = Distribution::uniform(q[0], q[1]);
    if (q[0] > q[1]) fail(p, "min must not exceed max");
  } else if (key == "triangular") {
    const auto q = params(3);
    d = Distribution::triangular(q[0], q[1], q[2]);
    if (!(q[0] <= q[1] && q[1] <= q[2])) fail(p, "parameters must satisfy min <= mode <= max");
  } else if (key == "exponential") {
    d = Distribution::exponential(as_number(arg, p));
  } else {
    fail(path, "unknown distribution '" + key + "'");
  }
  if (d.a < 0 || d.b < 0 || d.c < 0) fail(p, "parameters must be nonnegative");
  return d;
}

inline Json distribution_to_json(const Distribution& d) {
  switch (d.kind) {
    case Distribution::Kind::constant: return Json{{"constant", d.a}};
    case Distribution::Kind::uniform: return Json{{"uniform", {d.a, d.b}}};
    case Distribution::Kind::triangular: return Json{{"triangular", {d.a, d.b, d.c}}};
    case Distribution::Kind::exponential: return Json{{"exponential", d.a}};
  }
  return {};
}

inline std::size_t resolve_location(const EnvironmentMap& map, const Json& v, const std::string& path) {
  const std::string name = as_string(v, path);
  if (auto idx = map.find_location(name)) return *idx;
  fail(path, "unknown location '" + name + "'");
}

inline std::vector<WorkflowStep> parse_steps(const Json& v, const std::string& path,
                                             const EnvironmentMap& map, bool top_level) {
  if (!v.is_array()) fail(path, "expected a list of steps");
  if (v.empty()) fail(path, top_level ? "workflow must not be empty" : "cycle body must not be empty");
  std::vector<WorkflowStep> steps;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const std::string p = path + "[" + std::to_string(i) + "]";
    const Json& s = v[i];
    const std::string op = as_string(require(s, p, "op"), p + ".op");
    if (op == "goto" || op == "queue") {
      check_keys(s, p, {"op", "location"});
      const auto loc = resolve_location(map, require(s, p, "location"), p + ".location");
      steps.push_back(op == "goto" ? WorkflowStep::go_to(loc) : WorkflowStep::queue(loc));
    } else if (op == "dwell") {
      check_keys(s, p, {"op", "duration_s"});
      steps.push_back(WorkflowStep::dwell(parse_distribution(require(s, p, "duration_s"), p + ".duration_s")));
    } else if (op == "cycle") {
      check_keys(s, p, {"op", "repeat", "until_s", "steps"});
      std::optional<std::int64_t> repeat;
      std::optional<double> until;
      if (s.contains("repeat")) {
        repeat = as_integer(s["repeat"], p + ".repeat");
        if (*repeat < 0) fail(p + ".repeat", "must be nonnegative");
      }
      if (s.contains("until_s")) {
        until = as_number(s["until_s"], p + ".until_s");
        if (*until < 0) fail(p + ".until_s", "must be nonnegative");
      }
      if (!repeat && !until) fail(p, "cycle needs 'repeat' or 'until_s'");
      auto body = parse_steps(require(s, p, "steps"), p + ".steps", map, false);
      steps.push_back(WorkflowStep::cycle(std::move(body), repeat, until));
    } else if (op == "depart") {
      check_keys(s, p, {"op"});
      if (!top_level || i + 1 != v.size()) fail(p, "depart must be the last top-level step");
      steps.push_back(WorkflowStep::depart());
    } else {
      fail(p + ".op", "unknown step '" + op + "'");
    }
  }
  return steps;
}

inline Json steps_to_json(const std::vector<WorkflowStep>& steps, const EnvironmentMap& map) {
  Json out = Json::array();
  for (const auto& s : steps) {
    Json j;
    switch (s.kind) {
      case WorkflowStep::Kind::go_to:
        j = {{"op", "goto"}, {"location", map.locations[s.location].name}};
        break;
      case WorkflowStep::Kind::queue:
        j = {{"op", "queue"}, {"location", map.locations[s.location].name}};
        break;
      case WorkflowStep::Kind::dwell:
        j = {{"op", "dwell"}, {"duration_s", distribution_to_json(s.duration)}};
        break;
      case WorkflowStep::Kind::cycle:
        j = {{"op", "cycle"}};
        if (s.repeat) j["repeat"] = *s.repeat;
        if (s.until_s) j["until_s"] = *s.until_s;
        j["steps"] = steps_to_json(s.body, map);
        break;
      case WorkflowStep::Kind::depart:
        j = {{"op", "depart"}};
        break;
    }
    out.push_back(std::move(j));
  }
  return out;
}

inline Json cell_json(Cell c) { return Json::array({c.x, c.y}); }

inline EnvironmentMap parse_map(const Json& v) {
  const std::string path = "map";
  check_keys(v, path, {"cell_size_m", "width", "height", "blocked", "blocked_rects", "locations"});
  EnvironmentMap m;
  m.cell_size_m = as_number(require(v, path, "cell_size_m"), "map.cell_size_m");
  if (!(m.cell_size_m > 0)) fail("map.cell_size_m", "must be positive");
  const auto w = as_integer(require(v, path, "width"), "map.width");
  const auto h = as_integer(require(v, path, "height"), "map.height");
  if (w < 1 || h < 1) fail(path, "width and height must be at least 1");
  if (w * h > 100'000'000) fail(path, "map too large");
  m = EnvironmentMap::open(static_cast<int>(w), static_cast<int>(h), m.cell_size_m);

  auto block = [&](Cell c, const std::string& p) {
    if (!m.in_bounds(c)) fail(p, "blocked cell outside the map");
    m.set_blocked(c);
  };
  if (v.contains("blocked")) {
    const Json& list = v["blocked"];
    if (!list.is_array()) fail("map.blocked", "expected a list of cells");
    for (std::size_t i = 0; i < list.size(); ++i) {
      const std::string p = "map.blocked[" + std::to_string(i) + "]";
      block(as_cell(list[i], p), p);
    }
  }
  if (v.contains("blocked_rects")) {
    const Json& list = v["blocked_rects"];
    if (!list.is_array()) fail("map.blocked_rects", "expected a list of rectangles");
    for (std::size_t i = 0; i < list.size(); ++i) {
      const std::string p = "map.blocked_rects[" + std::to_string(i) + "]";
      for (Cell c : as_rect(list[i], p)) block(c, p);
    }
  }

  const Json& locs = require(v, path, "locations");
  if (!locs.is_object()) fail("map.locations", "expected an object of named locations");
  std::set<std::string> seen;
  for (const auto& [name, spec] : locs.items()) {
    const std::string p = "map.locations." + name;
    if (name.empty()) fail("map.locations", "location names must not be empty");
    if (!seen.insert(name).second) fail(p, "duplicate location name");
    check_keys(spec, p, {"cells", "rect", "capacity", "anchor"});
    Location loc;
    loc.name = name;
    if (spec.contains("cells")) {
      const Json& list = spec["cells"];
      if (!list.is_array()) fail(p + ".cells", "expected a list of cells");
      for (std::size_t i = 0; i < list.size(); ++i)
        loc.cells.push_back(as_cell(list[i], p + ".cells[" + std::to_string(i) + "]"));
    }
    if (spec.contains("rect")) {
      for (Cell c : as_rect(spec["rect"], p + ".rect")) loc.cells.push_back(c);
    }
    // Duplicate cells collapse; first occurrence keeps its position.
    std::set<Cell> unique;
    std::erase_if(loc.cells, [&](Cell c) { return !unique.insert(c).second; });
    if (loc.cells.empty()) fail(p, "location has no cells");
    for (Cell c : loc.cells) {
      if (!m.walkable(c))
        fail(p, "cell [" + std::to_string(c.x) + ", " + std::to_string(c.y) + "] is not walkable");
    }
    if (spec.contains("capacity")) {
      loc.capacity = as_integer(spec["capacity"], p + ".capacity");
      if (*loc.capacity < 1) fail(p + ".capacity", "must be at least 1");
    }
    if (spec.contains("anchor")) {
      loc.anchor = as_cell(spec["anchor"], p + ".anchor");
      if (!loc.contains(loc.anchor)) fail(p + ".anchor", "anchor must be one of the location's cells");
    } else {
      // Cell nearest to the centroid; earliest listed wins ties.
      double cx = 0, cy = 0;
      for (Cell c : loc.cells) {
        cx += c.x;
        cy += c.y;
      }
      cx /= static_cast<double>(loc.cells.size());
      cy /= static_cast<double>(loc.cells.size());
      double best = std::numeric_limits<double>::infinity();
      for (Cell c : loc.cells) {
        const double d = (c.x - cx) * (c.x - cx) + (c.y - cy) * (c.y - cy);
        if (d < best) {
          best = d;
          loc.anchor = c;
        }
      }
    }
    m.locations.push_back(std::move(loc));
  }
  return m;
}

inline std::vector<double> parse_arrival(const Json* v, std::int64_t population, const std::string& path) {
  std::vector<double> out;
  if (v == nullptr) {
    out.assign(static_cast<std::size_t>(population), 0.0);
    return out;
  }
  const Json& a = *v;
  check_keys(a, path, {"times_s", "cohorts", "start_s", "interval_s"});
  const int forms = a.contains("times_s") + a.contains("cohorts") + (a.contains("start_s") || a.contains("interval_s"));
  if (forms != 1) fail(path, "use exactly one of 'times_s', 'cohorts' or 'start_s'/'interval_s'");
  if (a.contains("times_s")) {
    const Json& list = a["times_s"];
    if (!list.is_array()) fail(path + ".times_s", "expected a list of times");
    for (std::size_t i = 0; i < list.size(); ++i)
      out.push_back(as_number(list[i], path + ".times_s[" + std::to_string(i) + "]"));
  } else if (a.contains("cohorts")) {
    const Json& list = a["cohorts"];
    if (!list.is_array()) fail(path + ".cohorts", "expected a list of cohorts");
    for (std::size_t i = 0; i < list.size(); ++i) {
      const std::string p = path + ".cohorts[" + std::to_string(i) + "]";
      check_keys(list[i], p, {"at_s", "count"});
      const double at = as_number(require(list[i], p, "at_s"), p + ".at_s");
      const auto count = as_integer(require(list[i], p, "count"), p + ".count");
      if (count < 0) fail(p + ".count", "must be nonnegative");
      if (static_cast<std::int64_t>(out.size()) + count > population)
        fail(path, "cohort counts exceed the population");
      out.insert(out.end(), static_cast<std::size_t>(count), at);
    }
  } else {
    const double start = a.contains("start_s") ? as_number(a["start_s"], path + ".start_s") : 0.0;
    const double every = a.contains("interval_s") ? as_number(a["interval_s"], path + ".interval_s") : 0.0;
    if (every < 0) fail(path + ".interval_s", "must be nonnegative");
    for (std::int64_t k = 0; k < population; ++k) out.push_back(start + static_cast<double>(k) * every);
  }
  if (static_cast<std::int64_t>(out.size()) != population)
    fail(path, "schedule lists " + std::to_string(out.size()) + " arrivals for a population of " +
                   std::to_string(population));
  for (double t : out)
    if (t < 0) fail(path, "arrival times must be nonnegative");
  return out;
}

inline AgentTypeSpec parse_agent_type(const Json& v, const std::string& path, const EnvironmentMap& map) {
  check_keys(v, path, {"name", "population", "spawn", "arrival", "desired_speed_mps", "radius_m", "workflow"});
  AgentTypeSpec t;
  t.name = as_string(require(v, path, "name"), path + ".name");
  if (t.name.empty()) fail(path + ".name", "must not be empty");
  const std::string p = "agent_types." + t.name;
  t.population = as_integer(require(v, path, "population"), p + ".population");
  if (t.population < 0) fail(p + ".population", "must be nonnegative");
  if (t.population > 10'000'000) fail(p + ".population", "too large");
  t.spawn = resolve_location(map, require(v, path, "spawn"), p + ".spawn");
  t.arrival_s = parse_arrival(v.contains("arrival") ? &v["arrival"] : nullptr, t.population, p + ".arrival");
  if (v.contains("desired_speed_mps")) {
    t.desired_speed = parse_distribution(v["desired_speed_mps"], p + ".desired_speed_mps");
    if (t.desired_speed.kind == Distribution::Kind::exponential || !(t.desired_speed.a > 0))
      fail(p + ".desired_speed_mps", "speed samples must be strictly positive");
  }
  if (v.contains("radius_m")) {
    t.radius_m = as_number(v["radius_m"], p + ".radius_m");
    if (!(t.radius_m > 0)) fail(p + ".radius_m", "must be positive");
  }
  t.workflow = parse_steps(require(v, path, "workflow"), p + ".workflow", map, true);
  return t;
}

inline ScenarioDefaults parse_defaults(const Json* v) {
  ScenarioDefaults d;
  if (v == nullptr) return d;
  const std::string path = "defaults";
  check_keys(*v, path, {"tick_length_s", "horizon_ticks", "seed", "radius_m", "min_duration_ticks",
                        "chunk_ticks", "base_p"});
  const Json& o = *v;
  if (o.contains("tick_length_s")) {
    d.tick_length_s = as_number(o["tick_length_s"], "defaults.tick_length_s");
    if (!(d.tick_length_s > 0)) fail("defaults.tick_length_s", "must be positive");
  }
  if (o.contains("horizon_ticks")) {
    d.horizon_ticks = as_integer(o["horizon_ticks"], "defaults.horizon_ticks");
    if (*d.horizon_ticks < 0) fail("defaults.horizon_ticks", "must be nonnegative");
  }
  if (o.contains("seed")) {
    if (!o["seed"].is_number_unsigned()) fail("defaults.seed", "expected a nonnegative integer");
    d.seed = o["seed"].get<std::uint64_t>();
  }
  if (o.contains("radius_m")) {
    d.radius_m = as_number(o["radius_m"], "defaults.radius_m");
    if (!(*d.radius_m > 0)) fail("defaults.radius_m", "must be positive");
  }
  if (o.contains("min_duration_ticks")) {
    d.min_duration_ticks = as_integer(o["min_duration_ticks"], "defaults.min_duration_ticks");
    if (*d.min_duration_ticks < 1) fail("defaults.min_duration_ticks", "must be at least 1");
  }
  if (o.contains("chunk_ticks")) {
    d.chunk_ticks = as_integer(o["chunk_ticks"], "defaults.chunk_ticks");
    if (*d.chunk_ticks < 1) fail("defaults.chunk_ticks", "must be at least 1");
  }
  if (o.contains("base_p")) {
    d.base_p = as_number(o["base_p"], "defaults.base_p");
    if (*d.base_p < 0 || *d.base_p > 1) fail("defaults.base_p", "must lie in [0, 1]");
  }
  return d;
}

}  // namespace detail

/// Parses and validates a scenario document. Throws ScenarioError on any problem;
/// a rejected document never yields a partial Scenario.
inline Scenario parse_scenario(std::string_view document) {
  Json root;
  try {
    root = Json::parse(document.begin(), document.end());
  } catch (const nlohmann::json::parse_error& e) {
    throw ScenarioError(std::string("syntax error: ") + e.what());
  }
  detail::check_keys(root, "document", {"map", "agent_types", "defaults"});
  Scenario s;
  s.defaults = detail::parse_defaults(root.contains("defaults") ? &root["defaults"] : nullptr);
  s.map = detail::parse_map(detail::require(root, "document", "map"));
  const Json& types = detail::require(root, "document", "agent_types");
  if (!types.is_array()) detail::fail("agent_types", "expected a list");
  std::set<std::string> names;
  for (std::size_t i = 0; i < types.size(); ++i) {
    auto t = detail::parse_agent_type(types[i], "agent_types[" + std::to_string(i) + "]", s.map);
    if (!names.insert(t.name).second) detail::fail("agent_types." + t.name, "duplicate agent type name");
    s.agent_types.push_back(std::move(t));
  }
  return s;
}

/// Canonical JSON form: every shorthand expanded (cells listed, arrivals per agent).
inline Json scenario_to_json(const Scenario& s) {
  Json defaults = {{"tick_length_s", s.defaults.tick_length_s}};
  if (s.defaults.horizon_ticks) defaults["horizon_ticks"] = *s.defaults.horizon_ticks;
  if (s.defaults.seed) defaults["seed"] = *s.defaults.seed;
  if (s.defaults.radius_m) defaults["radius_m"] = *s.defaults.radius_m;
  if (s.defaults.min_duration_ticks) defaults["min_duration_ticks"] = *s.defaults.min_duration_ticks;
  if (s.defaults.chunk_ticks) defaults["chunk_ticks"] = *s.defaults.chunk_ticks;
  if (s.defaults.base_p) defaults["base_p"] = *s.defaults.base_p;

  const auto& m = s.map;
  Json blocked = Json::array();
  for (int y = 0; y < m.height; ++y)
    for (int x = 0; x < m.width; ++x)
      if (!m.walkable(Cell{x, y})) blocked.push_back(detail::cell_json({x, y}));
  Json locations = Json::object();
  for (const auto& loc : m.locations) {
    Json cells = Json::array();
    for (Cell c : loc.cells) cells.push_back(detail::cell_json(c));
    Json j = {{"cells", std::move(cells)}};
    if (loc.capacity) j["capacity"] = *loc.capacity;
    j["anchor"] = detail::cell_json(loc.anchor);
    locations[loc.name] = std::move(j);
  }
  Json map = {{"cell_size_m", m.cell_size_m}, {"width", m.width},       {"height", m.height},
              {"blocked", std::move(blocked)},  {"locations", std::move(locations)}};

  Json types = Json::array();
  for (const auto& t : s.agent_types) {
    types.push_back({{"name", t.name},
                     {"population", t.population},
                     {"spawn", m.locations[t.spawn].name},
                     {"arrival", {{"times_s", t.arrival_s}}},
                     {"desired_speed_mps", detail::distribution_to_json(t.desired_speed)},
                     {"radius_m", t.radius_m},
                     {"workflow", detail::steps_to_json(t.workflow, m)}});
  }
  return {{"defaults", std::move(defaults)}, {"map", std::move(map)}, {"agent_types", std::move(types)}};
}

inline std::string serialize_scenario(const Scenario& s) { return scenario_to_json(s).dump(2) + "\n"; }

}  // namespace contactmix

#endif  // CONTACTMIX_SCENARIO_HPP
