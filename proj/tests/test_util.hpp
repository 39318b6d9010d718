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

#include <cmath>
#include <random>
#include <vector>

#include "corridor/qp.hpp"
#include "corridor/scenario.hpp"

namespace corridor::testing {

// ---------------------------------------------------------------------------
// Scenario builders
// ---------------------------------------------------------------------------

inline std::vector<Vec2> straight_polyline(double length, double step = 5.0) {
  std::vector<Vec2> pts;
  for (double x = 0.0; x < length + step / 2; x += step) pts.push_back({x, 0.0});
  return pts;
}

inline Scenario straight_scenario(double length = 100.0) {
  Scenario sc;
  sc.reference_polyline = straight_polyline(length);
  sc.reference_line = ReferenceLine::from_polyline(sc.reference_polyline);
  sc.ego = EgoState{{0.0, 0.0}, 0.0, 0.0, 0.0, 0.0};
  sc.goal_s = length;
  sc.road_half_width = 2.0;
  return sc;
}

inline Obstacle box_obstacle(const std::string& id, double cx, double cy,
                             double half_w, double half_h,
                             MotionSpec motion = {}) {
  Obstacle obs;
  obs.id = id;
  obs.footprint = {{-half_w, -half_h},
                   {half_w, -half_h},
                   {half_w, half_h},
                   {-half_w, half_h}};
  obs.pose = {{cx, cy}, 0.0};
  obs.motion = motion;
  return obs;
}

// Mirrors a straight-line (x-axis) scenario about the centerline.
inline Scenario mirror_scenario(const Scenario& sc) {
  Scenario out = sc;
  for (Vec2& p : out.reference_polyline) p.y = -p.y;
  out.reference_line = ReferenceLine::from_polyline(out.reference_polyline);
  out.ego.position.y = -out.ego.position.y;
  out.ego.heading = -out.ego.heading;
  out.ego.curvature = -out.ego.curvature;
  for (Obstacle& obs : out.obstacles) {
    for (Vec2& v : obs.footprint) v.y = -v.y;
    std::reverse(obs.footprint.begin(), obs.footprint.end());
    obs.pose.position.y = -obs.pose.position.y;
    obs.pose.heading = -obs.pose.heading;
    switch (obs.motion.type) {
      case MotionType::kConstantVelocity:
        obs.motion.velocity_heading = -obs.motion.velocity_heading;
        break;
      case MotionType::kScripted:
        for (ScriptedPose& sp : obs.motion.script) {
          sp.position.y = -sp.position.y;
          sp.heading = -sp.heading;
        }
        break;
      default:
        break;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Direct objective evaluation (independent of build_objective)
// ---------------------------------------------------------------------------

// Backward-difference derivative of order j at 1-based grid index i, with the
// same ghost convention as the implementation contract: ghosts are the
// backward Taylor extension of the initial state (p0, v0, a0).
inline double direct_derivative(const std::vector<double>& y, int i, int j,
                                double delta, double p0, double v0, double a0) {
  const double g0 = p0;
  const double g1 = p0 - delta * v0 + 0.5 * delta * delta * a0;
  const double g2 = p0 - 2.0 * delta * v0 + 2.0 * delta * delta * a0;
  auto value = [&](int idx) {
    if (idx >= 1) return y[idx - 1];
    if (idx == 0) return g0;
    if (idx == -1) return g1;
    return g2;
  };
  static const double binom[4][4] = {
      {1, 0, 0, 0}, {1, 1, 0, 0}, {1, 2, 1, 0}, {1, 3, 3, 1}};
  double acc = 0.0;
  for (int m = 0; m <= j; ++m) {
    acc += (m % 2 == 0 ? 1.0 : -1.0) * binom[j][m] * value(i - m);
  }
  return acc / std::pow(delta, j);
}

inline double direct_objective(const ReferenceProfileSet& refs,
                               const std::vector<double>& y, double delta,
                               double p0, double v0, double a0) {
  const int n = static_cast<int>(y.size());
  double total = 0.0;
  for (const ReferenceProfile& profile : refs.profiles) {
    for (int j = 0; j <= 3; ++j) {
      if (profile.weight[j].empty()) continue;
      for (int i = 1; i <= n; ++i) {
        const double w = profile.weight[j][i - 1];
        if (w == 0.0) continue;
        const double d = direct_derivative(y, i, j, delta, p0, v0, a0) -
                         profile.ref[j][i - 1];
        total += w * d * d;
      }
    }
  }
  return total;
}

// ---------------------------------------------------------------------------
// Projected-gradient oracle for box-constrained QPs
// ---------------------------------------------------------------------------

struct BoxQP {
  int n = 0;
  std::vector<std::vector<double>> h;  // dense symmetric
  std::vector<double> g;
  std::vector<double> lb, ub;
};

inline double box_qp_objective(const BoxQP& p, const std::vector<double>& y) {
  double acc = 0.0;
  for (int i = 0; i < p.n; ++i) {
    double hy = 0.0;
    for (int j = 0; j < p.n; ++j) hy += p.h[i][j] * y[j];
    acc += 0.5 * y[i] * hy + p.g[i] * y[i];
  }
  return acc;
}

inline std::vector<double> projected_gradient_solve(const BoxQP& p, int iters) {
  // Step size from the largest eigenvalue (power iteration).
  std::vector<double> v(p.n, 1.0), hv(p.n);
  double lam = 1.0;
  for (int it = 0; it < 50; ++it) {
    for (int i = 0; i < p.n; ++i) {
      hv[i] = 0.0;
      for (int j = 0; j < p.n; ++j) hv[i] += p.h[i][j] * v[j];
    }
    double norm = 0.0;
    for (double x : hv) norm += x * x;
    norm = std::sqrt(norm);
    if (norm < 1e-12) break;
    lam = norm;
    for (int i = 0; i < p.n; ++i) v[i] = hv[i] / norm;
  }
  const double eta = 1.0 / (lam + 1e-9);

  std::vector<double> y(p.n);
  for (int i = 0; i < p.n; ++i) {
    y[i] = std::min(std::max(0.0, p.lb[i]), p.ub[i]);
  }
  std::vector<double> grad(p.n);
  for (int it = 0; it < iters; ++it) {
    for (int i = 0; i < p.n; ++i) {
      grad[i] = p.g[i];
      for (int j = 0; j < p.n; ++j) grad[i] += p.h[i][j] * y[j];
    }
    for (int i = 0; i < p.n; ++i) {
      y[i] = std::min(std::max(y[i] - eta * grad[i], p.lb[i]), p.ub[i]);
    }
  }
  return y;
}

// ---------------------------------------------------------------------------
// Jerk- and acceleration-limited ramp oracle (closed form)
// ---------------------------------------------------------------------------

// Position at time t for a ramp from rest-accel (v0, a=0) to v_target under
// |a| <= a_max, |jerk| <= j_max, then cruise. Assumes v0 <= v_target.
inline double ramp_position(double t, double v0, double v_target, double a_max,
                            double j_max) {
  const double dv = v_target - v0;
  if (dv <= 0.0) return v0 * t;
  const double a_peak = std::min(a_max, std::sqrt(dv * j_max));
  const double t_rise = a_peak / j_max;
  const double dv_rise = 0.5 * j_max * t_rise * t_rise;
  const double dv_const = dv - 2.0 * dv_rise;
  const double t_const = dv_const / a_peak;

  // Phase boundaries.
  const double t1 = t_rise;
  const double t2 = t_rise + t_const;
  const double t3 = t2 + t_rise;

  // State at phase boundaries.
  const double v1 = v0 + dv_rise;
  const double s1 = v0 * t1 + j_max * t1 * t1 * t1 / 6.0;
  const double v2 = v1 + a_peak * t_const;
  const double s2 = s1 + v1 * t_const + 0.5 * a_peak * t_const * t_const;
  const double s3 =
      s2 + v2 * t_rise + 0.5 * a_peak * t_rise * t_rise -
      j_max * t_rise * t_rise * t_rise / 6.0;

  if (t <= t1) return v0 * t + j_max * t * t * t / 6.0;
  if (t <= t2) {
    const double u = t - t1;
    return s1 + v1 * u + 0.5 * a_peak * u * u;
  }
  if (t <= t3) {
    const double u = t - t2;
    return s2 + v2 * u + 0.5 * a_peak * u * u - j_max * u * u * u / 6.0;
  }
  return s3 + v_target * (t - t3);
}

// Instantaneous velocity of the same ramp.
inline double ramp_velocity(double t, double v0, double v_target, double a_max,
                            double j_max) {
  const double dv = v_target - v0;
  if (dv <= 0.0) return v0;
  const double a_peak = std::min(a_max, std::sqrt(dv * j_max));
  const double t_rise = a_peak / j_max;
  const double dv_rise = 0.5 * j_max * t_rise * t_rise;
  const double t_const = (dv - 2.0 * dv_rise) / a_peak;
  const double t1 = t_rise;
  const double t2 = t_rise + t_const;
  const double t3 = t2 + t_rise;
  const double v1 = v0 + dv_rise;
  const double v2 = v1 + a_peak * t_const;
  if (t <= t1) return v0 + 0.5 * j_max * t * t;
  if (t <= t2) return v1 + a_peak * (t - t1);
  if (t <= t3) {
    const double u = t - t2;
    return v2 + a_peak * u - 0.5 * j_max * u * u;
  }
  return v_target;
}

}  // namespace corridor::testing
