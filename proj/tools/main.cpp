// Copyright 2026 The Corridor Planner Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cstdio>
#include <filesystem>
#include <future>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "corridor/scenario.hpp"
#include "corridor/sim.hpp"
#include "corridor/trace_io.hpp"

namespace {

using namespace corridor;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitFallback = 2;
constexpr int kExitCollision = 3;
constexpr int kExitBenchGate = 4;

struct CommonArgs {
  std::vector<std::string> scenario_paths;
  std::string out_dir = "out";
  std::uint64_t seed = 0;
  int max_cycles = 1200;
  int reps = 200;
  int warmup = 20;
  std::vector<std::string> formats;
  std::vector<std::string> overrides;
  int jobs = 1;
};

std::string stem_of(const std::string& path) {
  return std::filesystem::path(path).stem().string();
}

Scenario load_with_overrides(const std::string& path,
                             const std::vector<std::string>& overrides) {
  Scenario sc = load_scenario_file(path);
  for (const std::string& kv : overrides) {
    const size_t eq = kv.find('=');
    if (eq == std::string::npos) {
      throw ParseError("--set expects KEY=VALUE, got '" + kv + "'");
    }
    apply_config_override(sc.config, kv.substr(0, eq), kv.substr(eq + 1));
  }
  const std::vector<std::string> violations = validate(sc);
  if (!violations.empty()) {
    std::string msg = "after overrides: ";
    for (const std::string& v : violations) msg += v + "; ";
    throw ValidationError(msg, violations);
  }
  return sc;
}

std::set<TraceFormat> parse_formats(const std::vector<std::string>& formats) {
  if (formats.empty()) {
    return {TraceFormat::kCsv, TraceFormat::kJson};
  }
  std::set<TraceFormat> out;
  for (const std::string& f : formats) {
    if (f == "csv") {
      out.insert(TraceFormat::kCsv);
    } else if (f == "json") {
      out.insert(TraceFormat::kJson);
    } else if (f == "svg") {
      out.insert(TraceFormat::kSvg);
    } else {
      throw ParseError("unknown format '" + f + "' (expect csv|json|svg)");
    }
  }
  return out;
}

int run_check(const CommonArgs& args) {
  bool all_valid = true;
  for (const std::string& path : args.scenario_paths) {
    try {
      (void)load_with_overrides(path, args.overrides);
      std::printf("%s: OK\n", path.c_str());
    } catch (const ValidationError& e) {
      all_valid = false;
      std::printf("%s: INVALID\n", path.c_str());
      for (const std::string& v : e.violations()) {
        std::printf("  - %s\n", v.c_str());
      }
    } catch (const Error& e) {
      all_valid = false;
      std::printf("%s: ERROR %s\n", path.c_str(), e.what());
    }
  }
  return all_valid ? kExitOk : kExitUsage;
}

int run_plan(const CommonArgs& args) {
  bool any_fallback = false;
  for (const std::string& path : args.scenario_paths) {
    const Scenario sc = load_with_overrides(path, args.overrides);
    const Trajectory traj = plan_cycle(sc);
    const std::string dir = args.scenario_paths.size() == 1
                                ? args.out_dir
                                : args.out_dir + "/" + stem_of(path);
    for (const std::string& file : emit_trajectory(traj, dir)) {
      std::printf("wrote %s\n", file.c_str());
    }
    if (traj.provenance == Provenance::kFallbackStop) {
      any_fallback = true;
      std::printf("%s: fallback (%s)\n", path.c_str(),
                  traj.diagnostics.fallback_reason.c_str());
    } else {
      std::printf("%s: nominal\n", path.c_str());
    }
  }
  return any_fallback ? kExitFallback : kExitOk;
}

int run_simulate(const CommonArgs& args) {
  const std::set<TraceFormat> formats = parse_formats(args.formats);

  struct Result {
    std::string path;
    SimOutcome outcome;
  };
  std::vector<Result> results(args.scenario_paths.size());

  auto work = [&](size_t i) {
    const std::string& path = args.scenario_paths[i];
    const Scenario sc = load_with_overrides(path, args.overrides);
    SimTrace trace = simulate(sc, args.max_cycles, args.seed);
    trace.scenario_name = stem_of(path);
    const std::string dir = args.scenario_paths.size() == 1
                                ? args.out_dir
                                : args.out_dir + "/" + stem_of(path);
    emit_trace(trace, sc, dir, formats);
    results[i] = {path, trace.outcome};
  };

  if (args.jobs <= 1 || args.scenario_paths.size() <= 1) {
    for (size_t i = 0; i < args.scenario_paths.size(); ++i) work(i);
  } else {
    std::vector<std::future<void>> futures;
    size_t next = 0;
    const size_t workers =
        std::min<size_t>(args.jobs, args.scenario_paths.size());
    std::mutex mu;
    for (size_t w = 0; w < workers; ++w) {
      futures.push_back(std::async(std::launch::async, [&]() {
        for (;;) {
          size_t i;
          {
            std::lock_guard<std::mutex> lock(mu);
            if (next >= args.scenario_paths.size()) return;
            i = next++;
          }
          work(i);
        }
      }));
    }
    for (auto& f : futures) f.get();
  }

  bool any_collision = false;
  bool all_goal = true;
  for (const Result& r : results) {
    std::printf("%s: %s\n", r.path.c_str(), sim_outcome_name(r.outcome));
    any_collision = any_collision || r.outcome == SimOutcome::kCollision;
    all_goal = all_goal && r.outcome == SimOutcome::kGoalReached;
  }
  if (any_collision) return kExitCollision;
  return all_goal ? kExitOk : kExitFallback;
}

int run_bench(const CommonArgs& args) {
  std::vector<std::pair<std::string, Scenario>> scenarios;
  for (const std::string& path : args.scenario_paths) {
    scenarios.emplace_back(stem_of(path), load_with_overrides(path, args.overrides));
  }
  const BenchReport report = bench(scenarios, args.reps, args.warmup, args.seed);
  std::filesystem::create_directories(args.out_dir);
  const std::string json_path = args.out_dir + "/bench.json";
  {
    std::ofstream out(json_path, std::ios::binary);
    out << bench_report_to_json(report);
  }
  std::printf("%s", bench_report_table(report).c_str());
  std::printf("wrote %s\n", json_path.c_str());
  return report.qp_gate_passed ? kExitOk : kExitBenchGate;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"corridor_planner: decision-and-planning engine for last-mile "
               "delivery scenarios"};
  app.require_subcommand(1);

  CommonArgs args;
  auto add_common = [&](CLI::App* cmd, bool needs_out) {
    cmd->add_option("scenarios", args.scenario_paths, "scenario JSON file(s)")
        ->required()
        ->check(CLI::ExistingFile);
    if (needs_out) cmd->add_option("--out", args.out_dir, "output directory");
    cmd->add_option("--seed", args.seed, "random seed (default 0)");
    cmd->add_option("--set", args.overrides,
                    "config override KEY=VALUE (repeatable)");
    cmd->add_option("--jobs", args.jobs, "parallel scenario workers");
  };

  CLI::App* check = app.add_subcommand("check", "validate scenario files");
  add_common(check, false);

  CLI::App* plan = app.add_subcommand("plan", "run a single planning cycle");
  add_common(plan, true);

  CLI::App* sim = app.add_subcommand("simulate", "closed-loop simulation");
  add_common(sim, true);
  sim->add_option("--max-cycles", args.max_cycles, "cycle budget (default 1200)");
  sim->add_option("--format", args.formats, "csv|json|svg (repeatable)");

  CLI::App* bench_cmd = app.add_subcommand("bench", "latency benchmark");
  add_common(bench_cmd, true);
  bench_cmd->add_option("--reps", args.reps, "repetitions (default 200)");
  bench_cmd->add_option("--warmup", args.warmup, "warmup cycles (default 20)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (app.got_subcommand(check)) return run_check(args);
    if (app.got_subcommand(plan)) return run_plan(args);
    if (app.got_subcommand(sim)) return run_simulate(args);
    if (app.got_subcommand(bench_cmd)) return run_bench(args);
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitUsage;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitUsage;
  }
  return kExitUsage;
}
