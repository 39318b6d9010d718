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

#include "corridor/guardian.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "corridor/prediction.hpp"

namespace corridor {

const char* guardian_level_name(GuardianLevel level) {
  switch (level) {
    case GuardianLevel::kOk:
      return "ok";
    case GuardianLevel::kSlowdown:
      return "slowdown";
    case GuardianLevel::kEmergencyStop:
      return "emergency_stop";
  }
  return "?";
}

std::string GuardianReason::describe() const {
  if (trigger.empty()) return "ok";
  std::ostringstream oss;
  oss << trigger;
  if (!obstacle_id.empty()) oss << " obstacle=" << obstacle_id;
  oss << " measured=" << measured << " threshold=" << threshold;
  return oss.str();
}

GuardianLevel guardian_level_for(double clearance, double ttc,
                                 const PlannerConfig& config) {
  if (clearance < config.d_emerg || ttc < config.ttc_emerg) {
    return GuardianLevel::kEmergencyStop;
  }
  if (ttc < config.ttc_slow) return GuardianLevel::kSlowdown;
  return GuardianLevel::kOk;
}

GuardianVerdict Guardian::make_override(GuardianLevel level,
                                        GuardianReason reason,
                                        const Trajectory* planned,
                                        const EgoState& ego,
                                        const VehicleParams& vehicle,
                                        const PlannerConfig& config) const {
  GuardianVerdict verdict;
  verdict.level = level;
  verdict.reason = std::move(reason);
  if (level == GuardianLevel::kOk) return verdict;

  const double dt = config.speed_horizon / config.speed_grid_count;
  const int count = config.speed_grid_count + 1;
  if (level == GuardianLevel::kEmergencyStop) {
    const Trajectory base = planned != nullptr ? *planned : Trajectory{};
    verdict.override_trajectory = decelerate_along(
        base, ego, vehicle, vehicle.max_decel, dt, count);
    verdict.override_trajectory->provenance = Provenance::kFallbackStop;
  } else {
    if (planned != nullptr && planned->samples.size() >= 2) {
      verdict.override_trajectory = scale_trajectory_speed(*planned, 0.5);
    } else {
      const Trajectory base;
      verdict.override_trajectory = decelerate_along(
          base, ego, vehicle, config.comfort_decel, dt, count);
    }
  }
  return verdict;
}

GuardianVerdict Guardian::check(const EgoState& ego,
                                const std::vector<Obstacle>& obstacles,
                                const Trajectory* planned,
                                const VehicleParams& vehicle,
                                const PlannerConfig& config,
                                const ReferenceLine& line) const {
  const Polygon ego_poly = transform_polygon(
      rectangle_polygon(vehicle.length, vehicle.width),
      {ego.position, ego.heading});
  const Vec2 ego_vel = unit_from_angle(ego.heading) * ego.speed;

  GuardianLevel worst = GuardianLevel::kOk;
  GuardianReason reason;
  double worst_ttc = std::numeric_limits<double>::infinity();

  for (const Obstacle& obs : obstacles) {
    const Polygon poly = obs.world_footprint();
    Vec2 p_ego, p_obs;
    const double clearance = convex_polygon_distance(ego_poly, poly, &p_ego, &p_obs);
    Vec2 dir = p_obs - p_ego;
    if (dir.norm() < 1e-12) {
      dir = obs.pose.position - ego.position;
    }
    dir = dir.normalized();
    const Vec2 rel = ego_vel - motion_velocity(obs, line, 0.0, config);
    const double closing = rel.dot(dir);
    const double ttc = clearance / std::max(closing, config.closing_eps);

    const GuardianLevel level = guardian_level_for(clearance, ttc, config);
    const bool more_severe =
        static_cast<int>(level) > static_cast<int>(worst) ||
        (level == worst && level != GuardianLevel::kOk && ttc < worst_ttc);
    if (more_severe) {
      worst = level;
      worst_ttc = ttc;
      reason.trigger = clearance < config.d_emerg ? "clearance" : "ttc";
      reason.obstacle_id = obs.id;
      if (reason.trigger == "clearance") {
        reason.measured = clearance;
        reason.threshold = config.d_emerg;
      } else {
        reason.measured = std::min(ttc, 1e9);
        reason.threshold = level == GuardianLevel::kEmergencyStop
                               ? config.ttc_emerg
                               : config.ttc_slow;
      }
    }
  }
  return make_override(worst, std::move(reason), planned, ego, vehicle, config);
}

GuardianVerdict Guardian::monitor_health(double cycle_seconds,
                                         Provenance provenance,
                                         const Trajectory* planned,
                                         const EgoState& ego,
                                         const VehicleParams& vehicle,
                                         const PlannerConfig& config) {
  if (provenance == Provenance::kFallbackStop) {
    ++consecutive_fallbacks_;
  } else {
    consecutive_fallbacks_ = 0;
  }

  GuardianLevel level = GuardianLevel::kOk;
  GuardianReason reason;
  if (consecutive_fallbacks_ >= 4) {
    level = GuardianLevel::kEmergencyStop;
    reason.trigger = "consecutive_fallbacks";
    reason.measured = consecutive_fallbacks_;
    reason.threshold = 4;
  } else if (consecutive_fallbacks_ >= 2) {
    level = GuardianLevel::kSlowdown;
    reason.trigger = "consecutive_fallbacks";
    reason.measured = consecutive_fallbacks_;
    reason.threshold = 2;
  }
  if (cycle_seconds > config.deadline && level < GuardianLevel::kSlowdown) {
    level = GuardianLevel::kSlowdown;
    reason.trigger = "deadline";
    reason.measured = cycle_seconds;
    reason.threshold = config.deadline;
  }
  return make_override(level, std::move(reason), planned, ego, vehicle, config);
}

}  // namespace corridor
