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

#include <string>
#include <vector>

#include "corridor/geometry.hpp"
#include "corridor/scenario.hpp"

namespace corridor {

enum class PredictionSource { kLaneFollow, kConstantVelocity, kScripted };

struct PredictionSample {
  double t = 0.0;
  Vec2 position;
  double heading = 0.0;
  double sigma = 0.0;  // m, standard deviation of the position estimate
};

// Future poses of one obstacle at uniform time steps, with a confidence
// standard deviation that never shrinks over the horizon.
struct PredictedTrajectory {
  std::string obstacle_id;
  PredictionSource source = PredictionSource::kConstantVelocity;
  double dt = 0.0;
  std::vector<PredictionSample> samples;

  // Pose at time t, clamped to [0, horizon], linearly interpolated.
  PredictionSample at(double t) const;
};

// Rule-based single-obstacle prediction.
//
// Scripted motion replays the script (sigma stays at sigma0). Obstacles
// within lane_attach_threshold of the line that follow the lane advance at
// constant speed along the line while the lateral offset decays with time
// constant tau_l. Everything else extrapolates at constant velocity. The
// first sample always equals the obstacle's current pose exactly.
PredictedTrajectory predict(const Obstacle& obstacle, const ReferenceLine& line,
                            double horizon, double dt,
                            const PlannerConfig& config);

// Ground-truth instantaneous velocity of an obstacle per its motion spec,
// used by the guardian's closing-speed rule and the simulator.
Vec2 motion_velocity(const Obstacle& obstacle, const ReferenceLine& line,
                     double t, const PlannerConfig& config);

// Ground-truth pose of an obstacle at absolute time t (exact integration of
// the motion spec; the simulator uses this to advance the world).
Pose2d motion_pose(const Obstacle& obstacle, const ReferenceLine& line, double t,
                   const PlannerConfig& config);

}  // namespace corridor
