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

#include "corridor/prediction.hpp"

#include <algorithm>
#include <cmath>

namespace corridor {

namespace {

ScriptedPose script_at(const std::vector<ScriptedPose>& script, double t) {
  if (t <= script.front().t) return script.front();
  if (t >= script.back().t) return script.back();
  size_t i = 0;
  while (i + 1 < script.size() && script[i + 1].t < t) ++i;
  const ScriptedPose& a = script[i];
  const ScriptedPose& b = script[i + 1];
  const double u = (t - a.t) / (b.t - a.t);
  ScriptedPose out;
  out.t = t;
  out.position = a.position + (b.position - a.position) * u;
  out.heading = normalize_angle(a.heading + u * angle_diff(b.heading, a.heading));
  return out;
}

struct LaneFollowState {
  bool attached = false;
  double s0 = 0.0;
  double l0 = 0.0;
};

LaneFollowState lane_follow_state(const Obstacle& obstacle,
                                  const ReferenceLine& line,
                                  const PlannerConfig& config) {
  LaneFollowState st;
  const FrenetPose fp = line.to_frenet(obstacle.pose.position);
  st.s0 = fp.s;
  st.l0 = fp.l;
  st.attached = std::abs(fp.l) <= config.lane_attach_threshold;
  return st;
}

Pose2d lane_follow_pose(const LaneFollowState& st, const ReferenceLine& line,
                        double v, double tau, double t) {
  const double s = clamp(st.s0 + v * t, 0.0, line.total_length());
  const double l = st.l0 * std::exp(-t / tau);
  const double dl_ds = v > 1e-9 ? (-l / tau) / v : 0.0;
  Pose2d pose;
  double heading = 0.0;
  pose.position = line.from_frenet(FrenetPose{s, l, dl_ds, 0.0}, &heading);
  pose.heading = heading;
  return pose;
}

}  // namespace

PredictionSample PredictedTrajectory::at(double t) const {
  if (samples.empty()) return {};
  if (t <= samples.front().t) return samples.front();
  if (t >= samples.back().t) return samples.back();
  const double u = t / dt;
  const size_t i = std::min(static_cast<size_t>(u), samples.size() - 2);
  const double frac = u - static_cast<double>(i);
  const PredictionSample& a = samples[i];
  const PredictionSample& b = samples[i + 1];
  PredictionSample out;
  out.t = t;
  out.position = a.position + (b.position - a.position) * frac;
  out.heading = normalize_angle(a.heading + frac * angle_diff(b.heading, a.heading));
  out.sigma = lerp(a.sigma, b.sigma, frac);
  return out;
}

PredictedTrajectory predict(const Obstacle& obstacle, const ReferenceLine& line,
                            double horizon, double dt,
                            const PlannerConfig& config) {
  PredictedTrajectory traj;
  traj.obstacle_id = obstacle.id;
  traj.dt = dt;
  const int n = static_cast<int>(std::floor(horizon / dt + 1e-9)) + 1;

  auto push = [&](double t, const Pose2d& pose, double sigma) {
    traj.samples.push_back(
        {t, pose.position, pose.heading, std::max(sigma, 0.0)});
  };

  switch (obstacle.motion.type) {
    case MotionType::kStatic: {
      traj.source = PredictionSource::kConstantVelocity;
      for (int k = 0; k < n; ++k) push(k * dt, obstacle.pose, config.sigma0);
      break;
    }
    case MotionType::kScripted: {
      traj.source = PredictionSource::kScripted;
      for (int k = 0; k < n; ++k) {
        const ScriptedPose sp = script_at(obstacle.motion.script, k * dt);
        push(k * dt, Pose2d{sp.position, sp.heading}, config.sigma0);
      }
      break;
    }
    case MotionType::kLaneFollow: {
      const LaneFollowState st = lane_follow_state(obstacle, line, config);
      const double v = obstacle.motion.lane_speed;
      const double growth = v > 1e-9 ? config.k_sigma : 0.0;
      if (st.attached) {
        traj.source = PredictionSource::kLaneFollow;
        for (int k = 0; k < n; ++k) {
          const double t = k * dt;
          push(t, lane_follow_pose(st, line, v, config.tau_l, t),
               config.sigma0 + growth * t);
        }
      } else {
        // Too far from the lane for the rule-based layer: constant velocity
        // along the obstacle's own heading.
        traj.source = PredictionSource::kConstantVelocity;
        const Vec2 vel = unit_from_angle(obstacle.pose.heading) * v;
        for (int k = 0; k < n; ++k) {
          const double t = k * dt;
          push(t, Pose2d{obstacle.pose.position + vel * t, obstacle.pose.heading},
               config.sigma0 + growth * t);
        }
      }
      break;
    }
    case MotionType::kConstantVelocity: {
      traj.source = PredictionSource::kConstantVelocity;
      const double v = obstacle.motion.speed;
      const double growth = std::abs(v) > 1e-9 ? config.k_sigma : 0.0;
      const Vec2 vel = unit_from_angle(obstacle.motion.velocity_heading) * v;
      for (int k = 0; k < n; ++k) {
        const double t = k * dt;
        push(t, Pose2d{obstacle.pose.position + vel * t, obstacle.pose.heading},
             config.sigma0 + growth * t);
      }
      break;
    }
  }

  // Continuity: the first sample is the current pose, bit for bit.
  traj.samples.front().position = obstacle.pose.position;
  traj.samples.front().heading = obstacle.pose.heading;
  return traj;
}

Pose2d motion_pose(const Obstacle& obstacle, const ReferenceLine& line, double t,
                   const PlannerConfig& config) {
  switch (obstacle.motion.type) {
    case MotionType::kStatic:
      return obstacle.pose;
    case MotionType::kScripted: {
      const ScriptedPose sp = script_at(obstacle.motion.script, t);
      return {sp.position, sp.heading};
    }
    case MotionType::kLaneFollow: {
      const LaneFollowState st = lane_follow_state(obstacle, line, config);
      if (!st.attached) {
        const Vec2 vel =
            unit_from_angle(obstacle.pose.heading) * obstacle.motion.lane_speed;
        return {obstacle.pose.position + vel * t, obstacle.pose.heading};
      }
      return lane_follow_pose(st, line, obstacle.motion.lane_speed, config.tau_l,
                              t);
    }
    case MotionType::kConstantVelocity: {
      const Vec2 vel =
          unit_from_angle(obstacle.motion.velocity_heading) * obstacle.motion.speed;
      return {obstacle.pose.position + vel * t, obstacle.pose.heading};
    }
  }
  return obstacle.pose;
}

Vec2 motion_velocity(const Obstacle& obstacle, const ReferenceLine& line,
                     double t, const PlannerConfig& config) {
  switch (obstacle.motion.type) {
    case MotionType::kStatic:
      return {0.0, 0.0};
    case MotionType::kConstantVelocity:
      return unit_from_angle(obstacle.motion.velocity_heading) *
             obstacle.motion.speed;
    case MotionType::kLaneFollow: {
      const LaneFollowState st = lane_follow_state(obstacle, line, config);
      const double v = obstacle.motion.lane_speed;
      if (!st.attached) return unit_from_angle(obstacle.pose.heading) * v;
      const double s = clamp(st.s0 + v * t, 0.0, line.total_length());
      const double l = st.l0 * std::exp(-t / config.tau_l);
      const Vec2 tangent = unit_from_angle(line.heading_at(s));
      return tangent * v + line.normal_at(s) * (-l / config.tau_l);
    }
    case MotionType::kScripted: {
      const auto& script = obstacle.motion.script;
      if (script.size() < 2 || t >= script.back().t) return {0.0, 0.0};
      const double h = 1e-3;
      const ScriptedPose a = script_at(script, t);
      const ScriptedPose b = script_at(script, t + h);
      return (b.position - a.position) / h;
    }
  }
  return {0.0, 0.0};
}

}  // namespace corridor
