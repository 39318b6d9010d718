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

#include <optional>
#include <string>
#include <vector>

#include "corridor/common.hpp"
#include "corridor/geometry.hpp"
#include "corridor/polygon.hpp"

namespace corridor {

class ParseError : public Error {
 public:
  explicit ParseError(const std::string& msg) : Error("ParseError", msg) {}
};

class ValidationError : public Error {
 public:
  ValidationError(const std::string& msg, std::vector<std::string> violations)
      : Error("ValidationError", msg), violations_(std::move(violations)) {}

  const std::vector<std::string>& violations() const { return violations_; }

 private:
  std::vector<std::string> violations_;
};

struct VehicleParams {
  double length = 2.0;        // m
  double width = 1.0;         // m
  double wheelbase = 1.4;     // m
  double max_speed = 7.0;     // m/s
  double max_accel = 1.5;     // m/s^2
  double max_decel = 3.0;     // m/s^2, positive magnitude
  double max_jerk = 2.0;      // m/s^3
  double max_curvature = 0.5; // 1/m
};

struct EgoState {
  Vec2 position;
  double heading = 0.0;   // rad
  double speed = 0.0;     // m/s, >= 0
  double accel = 0.0;     // m/s^2
  double curvature = 0.0; // 1/m
};

enum class MotionType { kStatic, kConstantVelocity, kLaneFollow, kScripted };

struct ScriptedPose {
  double t = 0.0;
  Vec2 position;
  double heading = 0.0;
};

struct MotionSpec {
  MotionType type = MotionType::kStatic;
  // constant_velocity
  double speed = 0.0;
  double velocity_heading = 0.0;
  // lane_follow
  double lane_speed = 0.0;
  // scripted
  std::vector<ScriptedPose> script;
};

struct Obstacle {
  std::string id;
  Polygon footprint;  // convex, body frame, CCW
  Pose2d pose;
  MotionSpec motion;

  Polygon world_footprint() const { return transform_polygon(footprint, pose); }
};

// Planner tuning knobs. Every value here is overridable from the scenario
// file's "config" object and from --set on the command line.
struct PlannerConfig {
  // Grids
  double path_horizon = 60.0;  // m (X for the path problem)
  int path_grid_count = 30;    // N for the path problem
  double speed_horizon = 8.0;  // s (X for the speed problem)
  int speed_grid_count = 40;   // N for the speed problem
  double replan_period = 0.1;  // s

  // DP lattice
  int lateral_sample_count = 9;       // odd, so l = 0 is always sampled
  double lateral_sample_spacing = 0.5;  // m

  // DP cost weights
  double dp_w_obs = 10.0;
  double dp_w_ref = 1.0;
  double dp_w_smooth = 5.0;
  double dp_w_kappa = 5.0;
  double dp_sigma_geom = 0.5;  // m, geometric spread of the risk field

  // Prediction
  double sigma0 = 0.2;                // m
  double k_sigma = 0.3;               // m/s, uncertainty growth rate
  double lane_attach_threshold = 2.5; // m
  double tau_l = 2.0;                 // s, lateral decay time constant

  // Margins
  double lateral_margin = 0.2;  // m
  double margin_long = 1.0;     // m

  // Path QP reference-profile weights
  double path_w_ref = 1.0;    // j=0 pull toward the coarse trajectory
  double path_w_ddl = 20.0;   // j=2 toward 0
  double path_w_dddl = 20.0;  // j=3 toward 0
  double theta_max = 0.5;     // rad, bound on |dl/ds| via tan(theta_max)

  // Speed QP reference-profile weights
  double speed_w_cruise_pos = 0.05;  // j=0 toward s0 + v_target t
  double speed_w_cruise_vel = 2.0;   // j=1 toward v_target
  double speed_w_accel = 0.02;       // j=2 toward 0
  double speed_w_jerk = 0.02;        // j=3 toward 0
  double speed_w_stop_vel = 1.0;     // j=1 toward 0 near a stop line

  // Targets and comfort
  double v_target = 3.0;       // m/s
  double comfort_decel = 2.0;  // m/s^2
  double a_lat_max = 2.0;      // m/s^2, lateral acceleration comfort cap

  // QP solver
  double tol_prim = 1e-4;
  double tol_dual = 1e-4;
  int max_iter = 4000;
  double rho = 1.0;
  bool warm_start = true;

  // Guardian
  double d_emerg = 0.3;       // m
  double ttc_emerg = 1.5;     // s
  double ttc_slow = 3.0;      // s
  double closing_eps = 1e-3;  // m/s
  double deadline = 0.1;      // s, planner cycle budget
};

struct Scenario {
  std::vector<Vec2> reference_polyline;
  ReferenceLine reference_line;  // built from reference_polyline
  EgoState ego;
  VehicleParams vehicle;
  std::vector<Obstacle> obstacles;
  double goal_s = 0.0;
  double road_half_width = 2.0;
  PlannerConfig config;
};

// Returns the list of violated invariants, empty when the scenario is valid.
std::vector<std::string> validate(const Scenario& scenario);

// Parses and validates scenario-file content (UTF-8 JSON). Unknown keys are
// an error. Throws ParseError on malformed input and ValidationError when
// invariants are violated.
Scenario load_scenario(const std::string& text);

Scenario load_scenario_file(const std::string& path);

// Serializes back to scenario-file JSON (round-trips through load_scenario
// to a structurally equal scenario).
std::string scenario_to_json(const Scenario& scenario);

// Applies a dotted-key override (e.g. "dp.w_obs=20", "planner.v_target=2.5")
// to the config. Throws ParseError for unknown keys or unparsable values.
void apply_config_override(PlannerConfig& config, const std::string& key,
                           const std::string& value);

}  // namespace corridor
