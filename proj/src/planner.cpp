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

#include "corridor/planner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "corridor/prediction.hpp"

namespace corridor {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(const Clock::time_point& t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

// Closed-form position of a jerk- and accel-limited velocity ramp from v0
// toward v_target (symmetric S-curve), then steady cruise.
double scurve_position(double t, double v0, double v_target, double a_limit,
                       double j_limit) {
  const double dv = v_target - v0;
  if (std::abs(dv) < 1e-12) return v0 * t;
  const double sign = dv > 0.0 ? 1.0 : -1.0;
  const double mag = std::abs(dv);
  const double a_peak = std::min(a_limit, std::sqrt(mag * j_limit));
  const double t_rise = a_peak / j_limit;
  const double dv_rise = 0.5 * j_limit * t_rise * t_rise;
  const double t_const = (mag - 2.0 * dv_rise) / a_peak;
  const double t1 = t_rise;
  const double t2 = t_rise + t_const;
  const double t3 = t2 + t_rise;
  const double v1 = v0 + sign * dv_rise;
  const double s1 = v0 * t1 + sign * j_limit * t1 * t1 * t1 / 6.0;
  const double v2 = v1 + sign * a_peak * t_const;
  const double s2 = s1 + v1 * t_const + sign * 0.5 * a_peak * t_const * t_const;
  const double s3 = s2 + v2 * t_rise + sign * (0.5 * a_peak * t_rise * t_rise -
                                               j_limit * t_rise * t_rise * t_rise / 6.0);
  if (t <= t1) return v0 * t + sign * j_limit * t * t * t / 6.0;
  if (t <= t2) {
    const double u = t - t1;
    return s1 + v1 * u + sign * 0.5 * a_peak * u * u;
  }
  if (t <= t3) {
    const double u = t - t2;
    return s2 + v2 * u +
           sign * (0.5 * a_peak * u * u - j_limit * u * u * u / 6.0);
  }
  return s3 + v_target * (t - t3);
}

// ---------------------------------------------------------------------------
// Cubic-Hermite evaluation of the solved lateral profile l(s).
// ---------------------------------------------------------------------------

struct PathEval {
  const ReferenceLine* line = nullptr;
  double s0 = 0.0;
  double delta = 0.0;
  std::vector<double> values;  // l at knots 0..n (knot 0 = start)
  std::vector<double> slopes;  // dl/ds at knots

  static PathEval build(const ReferenceLine& line, double s0, double delta,
                        double l0, double dl0,
                        const std::vector<double>& solution) {
    PathEval eval;
    eval.line = &line;
    eval.s0 = s0;
    eval.delta = delta;
    eval.values.resize(solution.size() + 1);
    eval.values[0] = l0;
    for (size_t i = 0; i < solution.size(); ++i) eval.values[i + 1] = solution[i];
    const size_t n = eval.values.size();
    eval.slopes.assign(n, 0.0);
    eval.slopes[0] = dl0;
    for (size_t k = 1; k + 1 < n; ++k) {
      eval.slopes[k] = (eval.values[k + 1] - eval.values[k - 1]) / (2.0 * delta);
    }
    if (n >= 2) {
      eval.slopes[n - 1] = (eval.values[n - 1] - eval.values[n - 2]) / delta;
    }
    return eval;
  }

  double end_s() const { return s0 + delta * (values.size() - 1); }

  void eval(double s, double* l, double* dl, double* ddl) const {
    const double span = end_s() - s0;
    double u = clamp(s - s0, 0.0, span);
    size_t k = std::min(static_cast<size_t>(u / delta), values.size() - 2);
    const double t = (u - k * delta) / delta;
    const double t2 = t * t;
    const double t3 = t2 * t;
    const double y0 = values[k];
    const double y1 = values[k + 1];
    const double m0 = slopes[k] * delta;
    const double m1 = slopes[k + 1] * delta;
    if (l != nullptr) {
      *l = (2 * t3 - 3 * t2 + 1) * y0 + (t3 - 2 * t2 + t) * m0 +
           (-2 * t3 + 3 * t2) * y1 + (t3 - t2) * m1;
    }
    if (dl != nullptr) {
      *dl = ((6 * t2 - 6 * t) * y0 + (3 * t2 - 4 * t + 1) * m0 +
             (-6 * t2 + 6 * t) * y1 + (3 * t2 - 2 * t) * m1) /
            delta;
    }
    if (ddl != nullptr) {
      *ddl = ((12 * t - 6) * y0 + (6 * t - 4) * m0 + (-12 * t + 6) * y1 +
              (6 * t - 2) * m1) /
             (delta * delta);
    }
  }

  CartesianState state_at(double s) const {
    double l = 0.0, dl = 0.0, ddl = 0.0;
    eval(s, &l, &dl, &ddl);
    const double sc = clamp(s, s0, end_s());
    return line->from_frenet_state(FrenetPose{sc, l, dl, ddl});
  }
};

// ---------------------------------------------------------------------------
// Stop profiles along a polyline
// ---------------------------------------------------------------------------

struct PolylineWalk {
  std::vector<Vec2> points;
  std::vector<double> headings;
  std::vector<double> curvatures;
  std::vector<double> arc;

  static PolylineWalk from_trajectory(const Trajectory& traj) {
    PolylineWalk walk;
    for (const TrajectorySample& s : traj.samples) {
      if (!walk.points.empty() && (s.position - walk.points.back()).norm() < 1e-9) {
        continue;
      }
      walk.points.push_back(s.position);
      walk.headings.push_back(s.heading);
      walk.curvatures.push_back(s.curvature);
    }
    walk.finish();
    return walk;
  }

  static PolylineWalk straight_ray(const EgoState& ego, double length) {
    PolylineWalk walk;
    const Vec2 dir = unit_from_angle(ego.heading);
    walk.points = {ego.position, ego.position + dir * std::max(length, 1.0)};
    walk.headings = {ego.heading, ego.heading};
    walk.curvatures = {0.0, 0.0};
    walk.finish();
    return walk;
  }

  void finish() {
    arc.resize(points.size());
    arc[0] = 0.0;
    for (size_t i = 1; i < points.size(); ++i) {
      arc[i] = arc[i - 1] + (points[i] - points[i - 1]).norm();
    }
  }

  bool usable() const { return points.size() >= 2 && arc.back() > 1e-9; }

  // Arc-length coordinate of the point closest to p.
  double project(const Vec2& p) const {
    double best_d = std::numeric_limits<double>::infinity();
    double best_arc = 0.0;
    for (size_t i = 0; i + 1 < points.size(); ++i) {
      const Vec2 d = points[i + 1] - points[i];
      const double len2 = d.squared_norm();
      const double t = len2 > 0.0 ? clamp((p - points[i]).dot(d) / len2, 0.0, 1.0) : 0.0;
      const Vec2 foot = points[i] + d * t;
      const double dist = (p - foot).norm();
      if (dist < best_d) {
        best_d = dist;
        best_arc = arc[i] + t * (arc[i + 1] - arc[i]);
      }
    }
    return best_arc;
  }

  void pose_at(double a, Vec2* pos, double* heading, double* curvature) const {
    if (a >= arc.back()) {
      const size_t n = points.size();
      const Vec2 dir = (points[n - 1] - points[n - 2]).normalized();
      *pos = points[n - 1] + dir * (a - arc.back());
      *heading = headings[n - 1];
      *curvature = 0.0;
      return;
    }
    size_t i = 0;
    while (i + 2 < points.size() && arc[i + 1] < a) ++i;
    const double seg = arc[i + 1] - arc[i];
    const double t = seg > 0.0 ? (a - arc[i]) / seg : 0.0;
    *pos = points[i] + (points[i + 1] - points[i]) * t;
    *heading = normalize_angle(headings[i] + t * angle_diff(headings[i + 1], headings[i]));
    *curvature = lerp(curvatures[i], curvatures[i + 1], t);
  }
};

Trajectory stop_profile_along(const PolylineWalk& walk, double start_arc,
                              const EgoState& ego, double decel, double dt,
                              int sample_count) {
  Trajectory out;
  out.provenance = Provenance::kFallbackStop;
  const double v0 = std::max(ego.speed, 0.0);
  const double stop_time = decel > 0.0 ? v0 / decel : 0.0;
  out.samples.reserve(sample_count);
  for (int j = 0; j < sample_count; ++j) {
    const double t = j * dt;
    double v, advance, a;
    if (t < stop_time) {
      v = v0 - decel * t;
      advance = v0 * t - 0.5 * decel * t * t;
      a = -decel;
    } else {
      v = 0.0;
      advance = decel > 0.0 ? v0 * v0 / (2.0 * decel) : 0.0;
      a = 0.0;
    }
    TrajectorySample sample;
    sample.t = t;
    walk.pose_at(start_arc + advance, &sample.position, &sample.heading,
                 &sample.curvature);
    sample.speed = v;
    sample.accel = a;
    out.samples.push_back(sample);
  }
  if (!out.samples.empty() && v0 <= 0.0) {
    // Already at rest: hold the exact current pose.
    for (TrajectorySample& s : out.samples) {
      s.position = ego.position;
      s.heading = ego.heading;
      s.curvature = ego.curvature;
    }
  } else if (!out.samples.empty()) {
    out.samples.front().position = ego.position;
    out.samples.front().heading = ego.heading;
    out.samples.front().curvature = ego.curvature;
  }
  return out;
}

}  // namespace

TrajectorySample Trajectory::at(double t) const {
  if (samples.empty()) return {};
  if (samples.size() == 1 || t <= samples.front().t) {
    TrajectorySample s = samples.front();
    s.t = t;
    return s;
  }
  if (t >= samples.back().t) {
    TrajectorySample s = samples.back();
    s.t = t;
    return s;
  }
  const double dt = samples[1].t - samples[0].t;
  const size_t i = std::min(static_cast<size_t>(t / dt), samples.size() - 2);
  const double u = (t - samples[i].t) / (samples[i + 1].t - samples[i].t);
  const TrajectorySample& a = samples[i];
  const TrajectorySample& b = samples[i + 1];
  TrajectorySample s;
  s.t = t;
  s.position = a.position + (b.position - a.position) * u;
  s.heading = normalize_angle(a.heading + u * angle_diff(b.heading, a.heading));
  s.curvature = lerp(a.curvature, b.curvature, u);
  s.speed = lerp(a.speed, b.speed, u);
  s.accel = lerp(a.accel, b.accel, u);
  return s;
}

Trajectory fallback_stop(const Trajectory* previous, const EgoState& ego,
                         const VehicleParams& vehicle,
                         const PlannerConfig& config) {
  const double decel = std::min(vehicle.max_decel, config.comfort_decel);
  const double dt = config.speed_horizon / config.speed_grid_count;
  const int count = config.speed_grid_count + 1;

  PolylineWalk walk;
  if (previous != nullptr && previous->samples.size() >= 2) {
    walk = PolylineWalk::from_trajectory(*previous);
  }
  double start_arc = 0.0;
  if (walk.usable()) {
    start_arc = walk.project(ego.position);
  } else {
    const double reach = std::max(ego.speed * ego.speed / (2.0 * std::max(decel, 1e-6)), 1.0);
    walk = PolylineWalk::straight_ray(ego, reach + 1.0);
  }
  return stop_profile_along(walk, start_arc, ego, decel, dt, count);
}

Trajectory decelerate_along(const Trajectory& base, const EgoState& ego,
                            const VehicleParams& vehicle, double decel,
                            double dt, int sample_count) {
  PolylineWalk walk;
  double start_arc = 0.0;
  if (base.samples.size() >= 2) {
    walk = PolylineWalk::from_trajectory(base);
  }
  if (walk.usable()) {
    start_arc = walk.project(ego.position);
  } else {
    const double d = std::max(decel, 1e-6);
    walk = PolylineWalk::straight_ray(ego, ego.speed * ego.speed / (2.0 * d) + 1.0);
  }
  Trajectory out = stop_profile_along(walk, start_arc, ego,
                                      std::min(decel, vehicle.max_decel), dt,
                                      sample_count);
  return out;
}

Trajectory scale_trajectory_speed(const Trajectory& base, double factor) {
  Trajectory out = base;
  if (base.samples.size() < 2) return out;
  PolylineWalk walk = PolylineWalk::from_trajectory(base);
  if (!walk.usable()) {
    for (TrajectorySample& s : out.samples) {
      s.speed *= factor;
      s.accel *= factor;
    }
    return out;
  }
  const double dt = base.samples[1].t - base.samples[0].t;
  double arc = walk.project(base.samples.front().position);
  for (size_t j = 0; j < out.samples.size(); ++j) {
    out.samples[j].speed = base.samples[j].speed * factor;
    if (j > 0) {
      arc += 0.5 * (out.samples[j - 1].speed + out.samples[j].speed) * dt;
      walk.pose_at(arc, &out.samples[j].position, &out.samples[j].heading,
                   &out.samples[j].curvature);
    }
    out.samples[j].accel = base.samples[j].accel * factor;
  }
  return out;
}

// ---------------------------------------------------------------------------
// plan_cycle
// ---------------------------------------------------------------------------

namespace {

Trajectory plan_nominal(const Scenario& sc, const Trajectory* previous,
                        const Clock::time_point& t_start) {
  const ReferenceLine& line = sc.reference_line;
  const PlannerConfig& cfg = sc.config;
  PlanDiagnostics diag;

  const FrenetPose ego_fp = line.to_frenet_state(
      {sc.ego.position, sc.ego.heading, sc.ego.curvature});
  const double s0 = ego_fp.s;

  // At (or past) the goal: plan a stop in place.
  if (s0 >= sc.goal_s - 0.01) {
    Trajectory hold = fallback_stop(previous, sc.ego, sc.vehicle, cfg);
    hold.provenance = Provenance::kNominal;
    hold.diagnostics.t_total = seconds_since(t_start);
    return hold;
  }

  const double v_est = clamp(sc.ego.speed, 1.0, sc.vehicle.max_speed);
  const double span = std::min(sc.goal_s, s0 + cfg.path_horizon) - s0;
  const double speed_dt = cfg.speed_horizon / cfg.speed_grid_count;

  // 1. Prediction.
  auto t_phase = Clock::now();
  const double pred_horizon =
      std::max(cfg.speed_horizon, std::min(span / v_est, 30.0));
  std::vector<PredictedTrajectory> predictions;
  predictions.reserve(sc.obstacles.size());
  for (const Obstacle& obs : sc.obstacles) {
    predictions.push_back(predict(obs, line, pred_horizon, speed_dt, cfg));
  }
  diag.t_predict = seconds_since(t_phase);

  // 2. Decision.
  t_phase = Clock::now();
  const Lattice lattice = build_lattice(sc);
  const CoarseTrajectory coarse = dp_search(lattice, predictions, sc);
  diag.decisions = coarse.decisions;
  diag.t_decision = seconds_since(t_phase);

  // 3. Tunnel.
  t_phase = Clock::now();
  const Tunnel tunnel = extract_tunnel(coarse, sc, predictions);
  diag.t_tunnel = seconds_since(t_phase);

  // 4. Path QP.
  t_phase = Clock::now();
  const int np = cfg.path_grid_count;
  const double delta_s = span / np;
  const GridSpec path_grid = GridSpec::from_initial_state(
      np, delta_s, ego_fp.l, ego_fp.dl_ds, ego_fp.ddl_ds2);

  ReferenceProfileSet path_refs;
  {
    ReferenceProfile toward_coarse;
    toward_coarse.ref[0].resize(np);
    toward_coarse.weight[0].assign(np, cfg.path_w_ref);
    for (int i = 1; i <= np; ++i) toward_coarse.ref[0][i - 1] = coarse.nodes[i].l;
    path_refs.profiles.push_back(std::move(toward_coarse));

    ReferenceProfile smooth;
    smooth.ref[2].assign(np, 0.0);
    smooth.weight[2].assign(np, cfg.path_w_ddl);
    smooth.ref[3].assign(np, 0.0);
    smooth.weight[3].assign(np, cfg.path_w_dddl);
    path_refs.profiles.push_back(std::move(smooth));
  }
  QPProblem path_problem = build_objective(path_refs, path_grid);
  path_problem.rows = build_path_constraints(tunnel, sc.vehicle, ego_fp,
                                             path_grid, cfg.theta_max);
  diag.t_path_build = seconds_since(t_phase);

  WarmStart path_warm;
  if (cfg.warm_start && previous != nullptr &&
      previous->diagnostics.path_n == np &&
      std::abs(previous->diagnostics.path_delta - delta_s) < 1e-12 &&
      previous->diagnostics.path_y.size() == static_cast<size_t>(np)) {
    path_warm.y = previous->diagnostics.path_y;
  } else {
    path_warm.y.resize(np);
    for (int i = 1; i <= np; ++i) path_warm.y[i - 1] = coarse.nodes[i].l;
  }

  SolverOptions opts;
  opts.tol_prim = cfg.tol_prim;
  opts.tol_dual = cfg.tol_dual;
  opts.max_iter = cfg.max_iter;
  opts.rho = cfg.rho;

  t_phase = Clock::now();
  const QPSolution path_sol = solve_qp(path_problem, opts, &path_warm);
  diag.t_path_solve = path_sol.solve_time;
  diag.path_status = path_sol.status;
  diag.path_iterations = path_sol.iterations;
  diag.path_solved = path_sol.status == QPStatus::kOptimal;
  if (!diag.path_solved) {
    throw Error("PathQpNotOptimal",
                path_sol.status == QPStatus::kInfeasible
                    ? "path QP infeasible"
                    : "path QP hit max iterations (primal " +
                          std::to_string(path_sol.primal_residual) + ")");
  }

  const PathEval path_eval =
      PathEval::build(line, s0, delta_s, ego_fp.l, ego_fp.dl_ds, path_sol.y);

  // 5. s-t projection along the solved path.
  t_phase = Clock::now();
  std::vector<PathPoint> path_points;
  {
    const double step = 0.25;
    const int count = static_cast<int>(span / step) + 1;
    path_points.reserve(count + 1);
    for (int i = 0; i <= count; ++i) {
      const double s = std::min(s0 + i * step, s0 + span);
      const CartesianState state = path_eval.state_at(s);
      path_points.push_back({s, state.position, state.heading});
      if (s >= s0 + span) break;
    }
  }
  const StConstraintSet st =
      extract_st_constraints(coarse, path_points, predictions, sc);
  diag.t_st = seconds_since(t_phase);

  // 6. Speed QP.
  t_phase = Clock::now();
  const int ns = cfg.speed_grid_count;
  const double v0 = std::max(sc.ego.speed, 0.0);
  // Condition the measured acceleration into the jerk-recoverable set:
  // below -sqrt(2*jerk*v0) the speed would be forced negative before the
  // acceleration can be released (physically the brakes hold at standstill).
  const double a_recoverable = -std::sqrt(2.0 * sc.vehicle.max_jerk * v0);
  const double a0 = clamp(sc.ego.accel,
                          std::max(-sc.vehicle.max_decel, a_recoverable),
                          sc.vehicle.max_accel);
  // The speed problem is solved in ego-relative stations (y = s - s0) to
  // keep it well scaled; everything below is relative, shifted back when
  // assembling the trajectory.
  const GridSpec speed_grid =
      GridSpec::from_initial_state(ns, speed_dt, 0.0, v0, a0);

  const double v_target = std::min(cfg.v_target, sc.vehicle.max_speed);
  // Reachable cruise profile: the closed-form jerk/accel-limited ramp from v0
  // toward v_target. Serves as the j=0 reference (a linear s0 + v_target*t
  // reference is unreachable during the ramp and induces velocity overshoot)
  // and as the station estimate for curvature lookups.
  const double ramp_a = v0 <= v_target
                            ? sc.vehicle.max_accel
                            : std::min(sc.vehicle.max_decel, cfg.comfort_decel);
  std::vector<double> s_nominal(ns);  // relative stations
  for (int j = 0; j < ns; ++j) {
    s_nominal[j] = scurve_position((j + 1) * speed_dt, v0, v_target, ramp_a,
                                   sc.vehicle.max_jerk);
  }
  StConstraintSet st_rel = st;
  for (int j = 0; j < ns; ++j) {
    st_rel.s_lower[j] -= s0;
    st_rel.s_upper[j] -= s0;
  }
  std::vector<double> caps(ns);
  for (int j = 0; j < ns; ++j) {
    const double kappa = path_eval.state_at(s0 + s_nominal[j]).curvature;
    const double curve_cap = std::sqrt(cfg.a_lat_max / std::max(std::abs(kappa), 1e-6));
    caps[j] = std::min(sc.vehicle.max_speed, curve_cap);
  }

  ReferenceProfileSet speed_refs;
  {
    ReferenceProfile cruise;
    cruise.ref[0].resize(ns);
    cruise.weight[0].assign(ns, cfg.speed_w_cruise_pos);
    cruise.ref[1].resize(ns);
    cruise.weight[1].assign(ns, cfg.speed_w_cruise_vel);
    for (int j = 0; j < ns; ++j) {
      cruise.ref[0][j] = std::min(s_nominal[j], st_rel.s_upper[j]);
      // Velocity reference tapers along the comfort braking envelope as the
      // nominal position runs into the s-t upper bound.
      const double dist = std::max(st_rel.s_upper[j] - s_nominal[j], 0.0);
      const double envelope = std::sqrt(2.0 * cfg.comfort_decel * dist);
      cruise.ref[1][j] = std::min(v_target, envelope);
    }
    speed_refs.profiles.push_back(std::move(cruise));

    ReferenceProfile comfort;
    comfort.ref[2].assign(ns, 0.0);
    comfort.weight[2].assign(ns, cfg.speed_w_accel);
    comfort.ref[3].assign(ns, 0.0);
    comfort.weight[3].assign(ns, cfg.speed_w_jerk);
    speed_refs.profiles.push_back(std::move(comfort));

    // Stop profile: pulls the terminal speed toward zero as the nominal
    // ramp runs into the tightest upper bound.
    const double d_brake =
        v_target * v_target / (2.0 * cfg.comfort_decel) + cfg.margin_long;
    ReferenceProfile stop;
    stop.ref[1].assign(ns, 0.0);
    stop.weight[1].assign(ns, 0.0);
    bool stop_active = false;
    for (int j = 0; j < ns; ++j) {
      const double dist = st_rel.s_upper[j] - s_nominal[j];
      const double frac = clamp(1.0 - dist / d_brake, 0.0, 1.0);
      if (frac > 0.0) {
        stop.weight[1][j] = cfg.speed_w_stop_vel * frac * frac;
        stop_active = true;
      }
    }
    if (stop_active) speed_refs.profiles.push_back(std::move(stop));
  }

  QPProblem speed_problem = build_objective(speed_refs, speed_grid);
  speed_problem.rows = build_speed_constraints(
      st_rel, sc.vehicle, SpeedStart{0.0, v0, a0}, caps, speed_grid);
  diag.t_speed_build = seconds_since(t_phase);

  WarmStart speed_warm;
  if (cfg.warm_start && previous != nullptr &&
      previous->diagnostics.speed_n == ns &&
      std::abs(previous->diagnostics.speed_delta - speed_dt) < 1e-12 &&
      previous->diagnostics.speed_y.size() == static_cast<size_t>(ns)) {
    // Previous solutions are stored as absolute stations; rebase and clamp
    // into the current bounds.
    speed_warm.y.resize(ns);
    for (int j = 0; j < ns; ++j) {
      speed_warm.y[j] = clamp(previous->diagnostics.speed_y[j] - s0,
                              st_rel.s_lower[j], st_rel.s_upper[j]);
    }
  } else {
    speed_warm.y = s_nominal;
    for (int j = 0; j < ns; ++j) {
      speed_warm.y[j] = clamp(speed_warm.y[j], st_rel.s_lower[j], st_rel.s_upper[j]);
    }
  }

  const QPSolution speed_sol = solve_qp(speed_problem, opts, &speed_warm);
  diag.t_speed_solve = speed_sol.solve_time;
  diag.speed_status = speed_sol.status;
  diag.speed_iterations = speed_sol.iterations;
  diag.speed_solved = speed_sol.status == QPStatus::kOptimal;
  if (!diag.speed_solved) {
    throw Error("SpeedQpNotOptimal",
                speed_sol.status == QPStatus::kInfeasible
                    ? "speed QP infeasible"
                    : "speed QP hit max iterations (primal " +
                          std::to_string(speed_sol.primal_residual) + ")");
  }

  // 7. Combine into a Cartesian trajectory.
  t_phase = Clock::now();
  Trajectory out;
  out.provenance = Provenance::kNominal;
  out.samples.resize(ns + 1);
  for (int j = 0; j <= ns; ++j) {
    const double t = j * speed_dt;
    const double s_j = j == 0 ? s0 : s0 + speed_sol.y[j - 1];
    double l = 0.0, dl = 0.0, ddl = 0.0;
    path_eval.eval(s_j, &l, &dl, &ddl);
    const CartesianState state = path_eval.state_at(s_j);

    TrajectorySample& sample = out.samples[j];
    sample.t = t;
    sample.position = state.position;
    sample.heading = state.heading;
    sample.curvature = state.curvature;
    if (std::abs(sample.curvature) > sc.vehicle.max_curvature) {
      sample.curvature = clamp(sample.curvature, -sc.vehicle.max_curvature,
                               sc.vehicle.max_curvature);
      diag.curvature_clamped = true;
    }

    // Relative grid value with ghost substitution for indices <= 0.
    auto grid_value = [&](int idx) {
      if (idx >= 1) return speed_sol.y[idx - 1];
      return speed_grid.ghost[static_cast<size_t>(-idx)];
    };
    double s_dot, s_ddot;
    if (j == 0) {
      s_dot = v0;
      s_ddot = a0;
    } else {
      // Centered differences (half-step accurate); backward at the last grid.
      if (j < ns) {
        s_dot = (grid_value(j + 1) - grid_value(j - 1)) / (2.0 * speed_dt);
        s_ddot = (grid_value(j + 1) - 2.0 * grid_value(j) + grid_value(j - 1)) /
                 (speed_dt * speed_dt);
      } else {
        s_dot = (grid_value(j) - grid_value(j - 1)) / speed_dt;
        s_ddot = (grid_value(j) - 2.0 * grid_value(j - 1) + grid_value(j - 2)) /
                 (speed_dt * speed_dt);
      }
    }
    const double kr = line.curvature_at(clamp(s_j, s0, s0 + span));
    const double factor = std::hypot(1.0 - kr * l, dl);
    sample.speed = std::max(s_dot, 0.0) * factor;
    sample.accel = s_ddot;
  }
  // The first sample is the ego state, exactly.
  out.samples[0].position = sc.ego.position;
  out.samples[0].heading = sc.ego.heading;
  out.samples[0].curvature = sc.ego.curvature;
  out.samples[0].speed = sc.ego.speed;
  diag.t_combine = seconds_since(t_phase);

  diag.path_n = np;
  diag.path_delta = delta_s;
  diag.path_y = path_sol.y;
  diag.speed_n = ns;
  diag.speed_delta = speed_dt;
  diag.speed_y.resize(ns);
  for (int j = 0; j < ns; ++j) diag.speed_y[j] = s0 + speed_sol.y[j];
  diag.t_total = seconds_since(t_start);
  out.diagnostics = std::move(diag);
  return out;
}

}  // namespace

Trajectory plan_cycle(const Scenario& sc, const Trajectory* previous) {
  const auto t_start = Clock::now();
  try {
    return plan_nominal(sc, previous, t_start);
  } catch (const Error& e) {
    Trajectory fb = fallback_stop(previous, sc.ego, sc.vehicle, sc.config);
    fb.diagnostics.fallback_reason = e.what();
    fb.diagnostics.t_total = seconds_since(t_start);
    return fb;
  } catch (const std::exception& e) {
    Trajectory fb = fallback_stop(previous, sc.ego, sc.vehicle, sc.config);
    fb.diagnostics.fallback_reason = std::string("Unexpected: ") + e.what();
    fb.diagnostics.t_total = seconds_since(t_start);
    return fb;
  }
}

}  // namespace corridor
