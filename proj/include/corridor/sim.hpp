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

#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "corridor/guardian.hpp"
#include "corridor/planner.hpp"
#include "corridor/scenario.hpp"

namespace corridor {

enum class SimOutcome { kGoalReached, kStopped, kCollision, kTimeout };

const char* sim_outcome_name(SimOutcome outcome);

enum class SimEventKind {
  kCollision,
  kGoalReached,
  kFallback,
  kGuardianSlowdown,
  kGuardianEmergency,
  kModelGap,
};

struct SimEvent {
  int cycle = 0;
  SimEventKind kind = SimEventKind::kFallback;
  std::string detail;
};

struct CycleRecord {
  int cycle = 0;
  double t = 0.0;  // simulated time, s
  EgoState ego;
  Provenance provenance = Provenance::kNominal;
  bool guardian_override = false;
  GuardianLevel guardian_level = GuardianLevel::kOk;
  std::string guardian_reason;
  std::string fallback_reason;
  std::map<std::string, DecisionLabel> decisions;
  double plan_seconds = 0.0;        // wall time of plan_cycle
  double path_solve_seconds = 0.0;  // path QP solve wall time
  double speed_solve_seconds = 0.0; // speed QP solve wall time
  std::string event;                // primary event token for the trace
};

struct SimTrace {
  std::string scenario_name;
  std::uint64_t seed = 0;
  double replan_period = 0.0;
  SimOutcome outcome = SimOutcome::kTimeout;
  std::vector<CycleRecord> cycles;
  std::vector<SimEvent> events;
  double final_s = 0.0;
  double final_speed = 0.0;

  int count_events(SimEventKind kind) const;
};

/// Closed-loop replay: advance ground truth, plan, run the guardian, follow
/// the active trajectory for one replan period (10 integration substeps with
/// exact-footprint collision checks), repeat.
SimTrace simulate(const Scenario& scenario, int max_cycles, std::uint64_t seed);

struct BenchScenarioStats {
  std::string name;
  int samples = 0;
  double p50_cycle = 0.0, p95_cycle = 0.0, p99_cycle = 0.0;
  double p50_qp = 0.0, p95_qp = 0.0, p99_qp = 0.0;  // path + speed solve
  double p50_path = 0.0, p99_path = 0.0;
  double p50_speed = 0.0, p99_speed = 0.0;
  int fallbacks = 0;
  int max_qp_iterations = 0;
};

struct BenchReport {
  std::vector<BenchScenarioStats> per_scenario;
  BenchScenarioStats aggregate;
  double qp_budget = 0.010;     // s, the p99 gate on combined QP solve time
  double cycle_budget = 0.025;  // s
  bool qp_gate_passed = false;
  bool cycle_gate_passed = false;
  bool deterministic = true;  // identical outputs across repetitions
};

/// Repeats plan_cycle on fixed snapshots and reports wall-time percentiles.
/// Scenario order is shuffled by `seed`; planner outputs are asserted
/// identical across repetitions.
BenchReport bench(const std::vector<std::pair<std::string, Scenario>>& scenarios,
                  int repetitions, int warmup, std::uint64_t seed);

// Nearest-rank percentile of a sample vector (q in [0, 1]).
double percentile(std::vector<double> samples, double q);

}  // namespace corridor
