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

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "corridor/decision.hpp"
#include "corridor/qp.hpp"
#include "corridor/scenario.hpp"

namespace corridor {

enum class Provenance { kNominal, kFallbackStop };

struct TrajectorySample {
  double t = 0.0;
  Vec2 position;
  double heading = 0.0;
  double curvature = 0.0;
  double speed = 0.0;   // planar speed, m/s
  double accel = 0.0;   // longitudinal acceleration along the path, m/s^2
};

struct PlanDiagnostics {
  // Per-phase wall times (s).
  double t_predict = 0.0;
  double t_decision = 0.0;
  double t_tunnel = 0.0;
  double t_path_build = 0.0;
  double t_path_solve = 0.0;
  double t_st = 0.0;
  double t_speed_build = 0.0;
  double t_speed_solve = 0.0;
  double t_combine = 0.0;
  double t_total = 0.0;

  std::map<std::string, DecisionLabel> decisions;
  bool path_solved = false;
  bool speed_solved = false;
  QPStatus path_status = QPStatus::kMaxIter;
  QPStatus speed_status = QPStatus::kMaxIter;
  int path_iterations = 0;
  int speed_iterations = 0;
  bool curvature_clamped = false;
  std::string fallback_reason;  // empty for nominal cycles

  // Grid metadata + solutions, consumed as next-cycle warm starts.
  int path_n = 0;
  double path_delta = 0.0;
  std::vector<double> path_y;
  int speed_n = 0;
  double speed_delta = 0.0;
  std::vector<double> speed_y;
};

struct Trajectory {
  std::vector<TrajectorySample> samples;
  Provenance provenance = Provenance::kNominal;
  PlanDiagnostics diagnostics;

  // Sample interpolated at time t (clamped to the horizon).
  TrajectorySample at(double t) const;
  double duration() const {
    return samples.empty() ? 0.0 : samples.back().t;
  }
};

/// Runs one full planning cycle: predict, decide, path QP, s-t projection,
/// speed QP, recombination. Never throws: every phase failure degrades to a
/// fallback stop recorded in diagnostics.
Trajectory plan_cycle(const Scenario& scenario,
                      const Trajectory* previous = nullptr);

/// Always-available stop: decelerate along the previous trajectory's path
/// when one exists, else straight along the current heading.
Trajectory fallback_stop(const Trajectory* previous, const EgoState& ego,
                         const VehicleParams& vehicle,
                         const PlannerConfig& config);

/// Stop trajectory along `base`'s own path at the given deceleration,
/// starting from the ego state (guardian emergency override).
Trajectory decelerate_along(const Trajectory& base, const EgoState& ego,
                            const VehicleParams& vehicle, double decel,
                            double dt, int sample_count);

/// Copy of `base` with speeds scaled by `factor` and the timing re-integrated
/// along the same path (guardian slowdown override).
Trajectory scale_trajectory_speed(const Trajectory& base, double factor);

}  // namespace corridor
