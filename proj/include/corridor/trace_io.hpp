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

#include <set>
#include <string>
#include <vector>

#include "corridor/sim.hpp"

namespace corridor {

class IoError : public Error {
 public:
  explicit IoError(const std::string& msg) : Error("IoError", msg) {}
};

enum class TraceFormat { kCsv, kJson, kSvg };

/// Writes trace.csv / summary.json / plot.svg under out_dir and returns the
/// paths written. trace.csv carries only deterministic per-cycle data
/// (cycle_ms is the simulated cycle duration); wall-clock timing statistics
/// go to summary.json.
std::vector<std::string> emit_trace(const SimTrace& trace,
                                    const Scenario& scenario,
                                    const std::string& out_dir,
                                    const std::set<TraceFormat>& formats);

/// Writes trajectory.csv + plan_summary.json for a single planned cycle.
std::vector<std::string> emit_trajectory(const Trajectory& trajectory,
                                         const std::string& out_dir);

std::string bench_report_to_json(const BenchReport& report);
std::string bench_report_table(const BenchReport& report);

}  // namespace corridor
