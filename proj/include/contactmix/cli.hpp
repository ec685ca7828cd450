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

#ifndef CONTACTMIX_CLI_HPP
#define CONTACTMIX_CLI_HPP

// `contactmix run` and `contactmix ingest-trace`. Exit status: 0 ok, 1 invalid
// scenario, trace or flags, 2 simulation fault, 3 I/O failure.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "contactmix/contacts.hpp"
#include "contactmix/engine.hpp"
#include "contactmix/report.hpp"
#include "contactmix/scenario.hpp"
#include "contactmix/trace.hpp"

namespace contactmix::cli {

enum ExitCode : int { kOk = 0, kInvalidInput = 1, kRunFault = 2, kIoFailure = 3 };

inline constexpr double kDefaultRadiusM = 2.0;
inline constexpr double kDefaultBaseP = 0.05;
inline constexpr Tick kDefaultHorizonTicks = 3600;
inline constexpr double kChunkSeconds = 900.0;
inline constexpr double kBucketSeconds = 3600.0;

/// Flags shared by both subcommands. Unset values fall back to the scenario
/// file, then to built-in defaults.
struct CommonFlags {
  std::string out;
  std::optional<double> tick_length_s;
  std::optional<double> radius_m;
  std::optional<Tick> min_duration_ticks;
  std::optional<Tick> chunk_ticks;
  std::optional<double> base_p;
  std::optional<Tick> bucket_ticks;
  bool per_day = false;
};

struct RunFlags {
  CommonFlags common;
  std::string scenario;
  std::optional<std::uint64_t> seed;
  std::optional<Tick> ticks;
  bool export_frames = false;
};

struct IngestFlags {
  CommonFlags common;
  std::string trace;
  std::string scenario;
  std::vector<std::string> populations;  // NAME=N
};

namespace detail {

struct Failure {
  int code;
  std::string message;
};

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Failure{kIoFailure, "cannot open " + path};
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw Failure{kIoFailure, "failed reading " + path};
  return text;
}

inline Scenario load_scenario(const std::string& path) {
  const std::string text = read_file(path);
  try {
    return parse_scenario(text);
  } catch (const ScenarioError& e) {
    throw Failure{kInvalidInput, path + ": " + e.what()};
  }
}

inline Tick ticks_for(double seconds, double tick_length_s) {
  return std::max<Tick>(1, seconds_to_ticks(seconds, tick_length_s));
}

/// Resolves every analysis parameter. `horizon` is filled in by the caller.
inline AnalysisOptions resolve(const CommonFlags& f, const ScenarioDefaults* file) {
  AnalysisOptions o;
  auto pick = [](const auto& flag, const auto* from_file, auto fallback) {
    if (flag) return static_cast<decltype(fallback)>(*flag);
    if (from_file && *from_file) return static_cast<decltype(fallback)>(**from_file);
    return fallback;
  };
  o.contact.tick_length_s = f.tick_length_s ? *f.tick_length_s : file ? file->tick_length_s : 1.0;
  o.contact.radius_m = pick(f.radius_m, file ? &file->radius_m : nullptr, kDefaultRadiusM);
  o.contact.min_duration_ticks = pick(f.min_duration_ticks, file ? &file->min_duration_ticks : nullptr, Tick{1});
  if (!(o.contact.tick_length_s > 0) || !std::isfinite(o.contact.tick_length_s))
    throw Failure{kInvalidInput, "tick length must be positive"};
  o.contact.chunk_ticks = pick(f.chunk_ticks, file ? &file->chunk_ticks : nullptr,
                               ticks_for(kChunkSeconds, o.contact.tick_length_s));
  o.base_p = pick(f.base_p, file ? &file->base_p : nullptr, kDefaultBaseP);
  o.bucket_ticks = f.bucket_ticks ? *f.bucket_ticks : ticks_for(kBucketSeconds, o.contact.tick_length_s);
  o.per_day = f.per_day;
  return o;
}

inline void validate(const AnalysisOptions& o) {
  try {
    o.validate();
  } catch (const std::invalid_argument& e) {
    throw Failure{kInvalidInput, e.what()};
  }
}

inline std::filesystem::path prepare_out(const std::string& out) {
  std::filesystem::path dir(out);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir)) throw Failure{kIoFailure, "cannot create output directory " + out};
  return dir;
}

inline void write_outputs(const std::filesystem::path& dir, const ContactLedger& ledger, const Roster& roster,
                          const AnalysisOptions& options, const nlohmann::ordered_json& manifest) {
  try {
    const Bundle bundle = analyze(ledger, roster, options);
    write_bundle(dir, bundle, ledger, roster, options);
    write_text(dir / "manifest.json", manifest.dump(2) + "\n");
  } catch (const IoError& e) {
    throw Failure{kIoFailure, e.what()};
  }
}

inline void apply_population_overrides(Roster& roster, const std::vector<std::string>& overrides) {
  for (const auto& item : overrides) {
    const auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0) throw Failure{kInvalidInput, "--population expects NAME=N, got " + item};
    const std::string name = item.substr(0, eq);
    std::int64_t n = 0;
    const std::string_view digits = std::string_view(item).substr(eq + 1);
    auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), n);
    if (ec != std::errc() || ptr != digits.data() + digits.size() || n < 0)
      throw Failure{kInvalidInput, "--population expects NAME=N, got " + item};
    auto it = std::find(roster.type_names.begin(), roster.type_names.end(), name);
    if (it == roster.type_names.end()) throw Failure{kInvalidInput, "--population: unknown type '" + name + "'"};
    const auto t = static_cast<std::size_t>(it - roster.type_names.begin());
    const auto seen = std::count(roster.agent_types.begin(), roster.agent_types.end(), static_cast<TypeIndex>(t));
    if (n < seen)
      throw Failure{kInvalidInput, "--population " + item + " is below the " + std::to_string(seen) +
                                       " agents of that type in the trace"};
    roster.populations[t] = n;
  }
}

/// Roster built from the agents seen in a trace, types in order of first appearance.
inline Roster roster_from_trace(const TraceReader& reader) {
  Roster r;
  r.type_names = reader.type_names();
  r.populations.assign(r.type_names.size(), 0);
  std::vector<std::pair<AgentId, TypeIndex>> seen(reader.agent_types().begin(), reader.agent_types().end());
  std::sort(seen.begin(), seen.end());
  for (const auto& [id, type] : seen) {
    r.agents.push_back(id);
    r.agent_types.push_back(type);
    ++r.populations[type];
  }
  return r;
}

}  // namespace detail

inline int cmd_run(const RunFlags& flags, std::ostream& err) {
  using detail::Failure;
  try {
    const Scenario scenario = detail::load_scenario(flags.scenario);
    const ScenarioDefaults& file = scenario.defaults;
    AnalysisOptions options = detail::resolve(flags.common, &file);

    SimConfig sim;
    sim.tick_length_s = options.contact.tick_length_s;
    sim.horizon = flags.ticks ? *flags.ticks : file.horizon_ticks.value_or(kDefaultHorizonTicks);
    sim.seed = flags.seed ? *flags.seed : file.seed.value_or(0);
    try {
      sim.validate();
    } catch (const std::invalid_argument& e) {
      throw Failure{kInvalidInput, e.what()};
    }
    options.horizon_ticks = sim.horizon;
    detail::validate(options);

    const auto dir = detail::prepare_out(flags.common.out);
    const Roster roster = Roster::from_scenario(scenario);
    ContactLedger ledger;
    std::ofstream frames_out;
    std::optional<FrameWriter> frames;
    if (flags.export_frames) {
      frames_out.open(dir / "frames.csv", std::ios::binary | std::ios::trunc);
      if (!frames_out) throw Failure{kIoFailure, "cannot open " + (dir / "frames.csv").string() + " for writing"};
      frames.emplace(frames_out, roster.type_names);
    }

    RunSummary summary;
    try {
      summary = run(scenario, sim, [&](const TickFrame& frame) {
        ledger.observe_tick(frame, options.contact.radius_m);
        if (frames) frames->write(frame);
      });
    } catch (const RunFault& e) {
      throw Failure{kRunFault, e.what()};
    } catch (const NoRouteError& e) {
      throw Failure{kRunFault, e.what()};
    }
    ledger.finalize();
    if (frames) {
      frames_out.close();
      if (!frames_out) throw Failure{kIoFailure, "failed writing frames.csv"};
    }

    nlohmann::ordered_json manifest = {
        {"command", "run"},
        {"scenario", flags.scenario},
        {"analysis", options_json(options)},
        {"simulation",
         {{"seed", sim.seed},
          {"horizon_ticks", sim.horizon},
          {"tick_length_s", sim.tick_length_s},
          {"physics_substeps", sim.physics_substeps},
          {"waypoint_threshold_m", sim.waypoint_threshold_m},
          {"forces",
           {{"relaxation_time_s", sim.forces.relaxation_time_s},
            {"repulsion_strength", sim.forces.repulsion_strength},
            {"repulsion_range_m", sim.forces.repulsion_range_m},
            {"obstacle_strength", sim.forces.obstacle_strength},
            {"obstacle_range_m", sim.forces.obstacle_range_m},
            {"max_speed_factor", sim.forces.max_speed_factor}}},
          {"arrivals", summary.arrivals},
          {"departures", summary.departures},
          {"routes_planned", summary.routes_planned}}},
        {"types", roster.type_names},
        {"populations", roster.populations},
        {"contact_records", ledger.records().size()},
        {"frames_exported", flags.export_frames}};
    detail::write_outputs(dir, ledger, roster, options, manifest);
    return kOk;
  } catch (const Failure& f) {
    err << "error: " << f.message << '\n';
    return f.code;
  }
}

inline int cmd_ingest(const IngestFlags& flags, std::ostream& err) {
  using detail::Failure;
  try {
    std::optional<Scenario> scenario;
    if (!flags.scenario.empty()) scenario = detail::load_scenario(flags.scenario);
    AnalysisOptions options = detail::resolve(flags.common, scenario ? &scenario->defaults : nullptr);
    // Horizon is only known after reading; validate the rest first.
    {
      AnalysisOptions probe = options;
      probe.per_day = false;
      detail::validate(probe);
    }

    std::ifstream in(flags.trace, std::ios::binary);
    if (!in) throw Failure{kIoFailure, "cannot open " + flags.trace};

    std::optional<Roster> roster;
    std::optional<std::vector<std::string>> fixed;
    if (scenario) {
      roster = Roster::from_scenario(*scenario);
      fixed = roster->type_names;
    }
    TraceReader reader(in, fixed);
    ContactLedger ledger;
    Tick frames = 0;
    try {
      while (auto frame = reader.next()) {
        if (roster) {
          for (const auto& e : frame->entries) {
            const auto t = roster->type_of(e.id);
            if (!t)
              throw Failure{kInvalidInput, flags.trace + ": tick " + std::to_string(frame->tick) + ": agent " +
                                               std::to_string(e.id) + " is not in the scenario"};
            if (*t != e.type)
              throw Failure{kInvalidInput, flags.trace + ": tick " + std::to_string(frame->tick) + ": agent " +
                                               std::to_string(e.id) + " has type '" + roster->type_names[e.type] +
                                               "', scenario says '" + roster->type_names[*t] + "'"};
          }
        }
        ledger.observe_tick(*frame, options.contact.radius_m);
        ++frames;
      }
    } catch (const TraceError& e) {
      throw Failure{kInvalidInput, flags.trace + ": " + e.what()};
    }
    if (in.bad()) throw Failure{kIoFailure, "failed reading " + flags.trace};
    ledger.finalize();

    if (!roster) roster = detail::roster_from_trace(reader);
    detail::apply_population_overrides(*roster, flags.populations);
    options.horizon_ticks = frames;
    detail::validate(options);

    const auto dir = detail::prepare_out(flags.common.out);
    nlohmann::ordered_json manifest = {{"command", "ingest-trace"},
                                       {"trace", flags.trace},
                                       {"scenario", flags.scenario.empty() ? nlohmann::ordered_json(nullptr)
                                                                           : nlohmann::ordered_json(flags.scenario)},
                                       {"analysis", options_json(options)},
                                       {"types", roster->type_names},
                                       {"populations", roster->populations},
                                       {"contact_records", ledger.records().size()}};
    detail::write_outputs(dir, ledger, *roster, options, manifest);
    return kOk;
  } catch (const Failure& f) {
    err << "error: " << f.message << '\n';
    return f.code;
  }
}

inline void add_common(CLI::App& app, CommonFlags& f, std::map<std::string, CLI::Option*>& opts) {
  app.add_option("--out", f.out, "Output directory")->required();
  opts["tick"] = app.add_option("--tick-length-s", "Seconds per tick")->type_name("FLOAT");
  opts["radius"] = app.add_option("--radius-m", "Contact radius in meters")->type_name("FLOAT");
  opts["min"] = app.add_option("--min-duration-ticks", "Shortest contact that counts")->type_name("INT");
  opts["chunk"] = app.add_option("--chunk-ticks", "Ticks per effective contact")->type_name("INT");
  opts["p"] = app.add_option("--base-p", "Per-effective-contact transmission probability")->type_name("FLOAT");
  opts["bucket"] = app.add_option("--bucket-ticks", "Bucket length of the time series")->type_name("INT");
  app.add_flag("--per-day", f.per_day, "Rescale counts and durations to one day");
}

template <class T>
std::optional<T> option_value(CLI::Option* opt) {
  if (opt->count() == 0) return std::nullopt;
  return opt->as<T>();
}

inline void collect_common(CommonFlags& f, std::map<std::string, CLI::Option*>& opts) {
  f.tick_length_s = option_value<double>(opts["tick"]);
  f.radius_m = option_value<double>(opts["radius"]);
  f.min_duration_ticks = option_value<Tick>(opts["min"]);
  f.chunk_ticks = option_value<Tick>(opts["chunk"]);
  f.base_p = option_value<double>(opts["p"]);
  f.bucket_ticks = option_value<Tick>(opts["bucket"]);
}

/// Entry point for the command-line tool. `argv[0]` is the program name.
inline int main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Contact matrices from simulated or recorded movement", "contactmix"};
  app.require_subcommand(1);

  RunFlags run_flags;
  std::map<std::string, CLI::Option*> run_opts;
  auto* run_cmd = app.add_subcommand("run", "Simulate a scenario and write the matrix bundle");
  run_cmd->add_option("--scenario", run_flags.scenario, "Scenario JSON file")->required();
  auto* seed_opt = run_cmd->add_option("--seed", "Random seed")->type_name("UINT");
  auto* ticks_opt = run_cmd->add_option("--ticks", "Horizon in ticks")->type_name("INT");
  run_cmd->add_flag("--export-frames", run_flags.export_frames, "Also write frames.csv");
  add_common(*run_cmd, run_flags.common, run_opts);

  IngestFlags ingest_flags;
  std::map<std::string, CLI::Option*> ingest_opts;
  auto* ingest_cmd = app.add_subcommand("ingest-trace", "Compute the matrix bundle from a position trace");
  ingest_cmd->add_option("--trace", ingest_flags.trace, "Trace CSV file")->required();
  ingest_cmd->add_option("--scenario", ingest_flags.scenario, "Scenario supplying roster and populations");
  ingest_cmd->add_option("--population", ingest_flags.populations, "Type population override NAME=N");
  add_common(*ingest_cmd, ingest_flags.common, ingest_opts);

  try {
    app.parse(argc, argv);
    if (run_cmd->parsed()) {
      collect_common(run_flags.common, run_opts);
      run_flags.seed = option_value<std::uint64_t>(seed_opt);
      run_flags.ticks = option_value<Tick>(ticks_opt);
    } else {
      collect_common(ingest_flags.common, ingest_opts);
    }
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kInvalidInput;
  }
  return run_cmd->parsed() ? cmd_run(run_flags, err) : cmd_ingest(ingest_flags, err);
}

}  // namespace contactmix::cli

#endif  // CONTACTMIX_CLI_HPP
