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

#include "corridor/sim.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "corridor/prediction.hpp"

namespace corridor {

const char* sim_outcome_name(SimOutcome outcome) {
  switch (outcome) {
    case SimOutcome::kGoalReached:
      return "goal_reached";
    case SimOutcome::kStopped:
      return "stopped";
    case SimOutcome::kCollision:
      return "collision";
    case SimOutcome::kTimeout:
      return "timeout";
  }
  return "?";
}

int SimTrace::count_events(SimEventKind kind) const {
  int count = 0;
  for (const SimEvent& e : events) {
    if (e.kind == kind) ++count;
  }
  return count;
}

double percentile(std::vector<double> samples, double q) {
  if (samples.empty()) return 0.0;
  std::sort(samples.begin(), samples.end());
  const size_t rank = static_cast<size_t>(
      std::ceil(q * static_cast<double>(samples.size())));
  const size_t idx = rank == 0 ? 0 : std::min(rank - 1, samples.size() - 1);
  return samples[idx];
}

namespace {

// Obstacle view at absolute time T: pose advanced per the motion spec, script
// rebased so the planner sees time-relative data.
Obstacle obstacle_at_time(const Obstacle& original, const ReferenceLine& line,
                          double t_abs, const PlannerConfig& config) {
  Obstacle out = original;
  out.pose = motion_pose(original, line, t_abs, config);
  if (original.motion.type == MotionType::kScripted) {
    std::vector<ScriptedPose> rebased;
    ScriptedPose now;
    now.t = 0.0;
    now.position = out.pose.position;
    now.heading = out.pose.heading;
    rebased.push_back(now);
    for (const ScriptedPose& sp : original.motion.script) {
      if (sp.t > t_abs + 1e-12) {
        ScriptedPose shifted = sp;
        shifted.t = sp.t - t_abs;
        rebased.push_back(shifted);
      }
    }
    out.motion.script = std::move(rebased);
  }
  return out;
}

}  // namespace

SimTrace simulate(const Scenario& scenario, int max_cycles, std::uint64_t seed) {
  SimTrace trace;
  trace.seed = seed;
  trace.replan_period = scenario.config.replan_period;

  const ReferenceLine& line = scenario.reference_line;
  const PlannerConfig& cfg = scenario.config;
  const double period = cfg.replan_period;
  const bool through_goal = scenario.goal_s >= line.total_length() - 0.25;

  Scenario world = scenario;
  Guardian guardian;
  Trajectory previous;
  bool has_previous = false;

  const Polygon ego_body =
      rectangle_polygon(scenario.vehicle.length, scenario.vehicle.width);
  const double quarter = scenario.vehicle.length / 4.0;
  const double circle_radius = std::hypot(quarter, scenario.vehicle.width / 2.0);

  int stationary_cycles = 0;
  SimOutcome outcome = SimOutcome::kTimeout;

  for (int cycle = 0; cycle < max_cycles; ++cycle) {
    const double t_abs = cycle * period;

    // Planner snapshot at the current time.
    Scenario snapshot = scenario;
    snapshot.ego = world.ego;
    snapshot.obstacles.clear();
    for (const Obstacle& obs : scenario.obstacles) {
      snapshot.obstacles.push_back(obstacle_at_time(obs, line, t_abs, cfg));
    }

    const Trajectory traj =
        plan_cycle(snapshot, has_previous ? &previous : nullptr);

    const GuardianVerdict v_check =
        guardian.check(world.ego, snapshot.obstacles, &traj, scenario.vehicle,
                       cfg, line);
    const GuardianVerdict v_health = guardian.monitor_health(
        traj.diagnostics.t_total, traj.provenance, &traj, world.ego,
        scenario.vehicle, cfg);
    const GuardianVerdict& verdict =
        static_cast<int>(v_health.level) > static_cast<int>(v_check.level)
            ? v_health
            : v_check;

    const Trajectory* active = &traj;
    bool overridden = false;
    if (verdict.level != GuardianLevel::kOk && verdict.override_trajectory) {
      active = &*verdict.override_trajectory;
      overridden = true;
    }

    CycleRecord record;
    record.cycle = cycle;
    record.t = t_abs;
    record.ego = world.ego;
    record.provenance = traj.provenance;
    record.guardian_override = overridden;
    record.guardian_level = verdict.level;
    record.guardian_reason =
        verdict.level == GuardianLevel::kOk ? "" : verdict.reason.describe();
    record.fallback_reason = traj.diagnostics.fallback_reason;
    record.decisions = traj.diagnostics.decisions;
    record.plan_seconds = traj.diagnostics.t_total;
    record.path_solve_seconds = traj.diagnostics.t_path_solve;
    record.speed_solve_seconds = traj.diagnostics.t_speed_solve;

    if (traj.provenance == Provenance::kFallbackStop) {
      trace.events.push_back(
          {cycle, SimEventKind::kFallback, traj.diagnostics.fallback_reason});
    }
    if (verdict.level == GuardianLevel::kSlowdown) {
      trace.events.push_back(
          {cycle, SimEventKind::kGuardianSlowdown, verdict.reason.describe()});
    } else if (verdict.level == GuardianLevel::kEmergencyStop) {
      trace.events.push_back(
          {cycle, SimEventKind::kGuardianEmergency, verdict.reason.describe()});
    }

    // Follow the active trajectory for one period with substep collision
    // checks against the exact rectangle footprint.
    bool collided = false;
    std::string collision_id;
    bool model_gap = false;
    TrajectorySample end_sample;
    constexpr int kSubsteps = 10;
    for (int k = 1; k <= kSubsteps; ++k) {
      const double tau = period * k / kSubsteps;
      const TrajectorySample sample = active->at(tau);
      if (k == kSubsteps) end_sample = sample;
      const Polygon ego_poly = transform_polygon(
          ego_body, {sample.position, sample.heading});
      for (const Obstacle& obs : scenario.obstacles) {
        const Pose2d obs_pose = motion_pose(obs, line, t_abs + tau, cfg);
        const Polygon obs_poly = transform_polygon(obs.footprint, obs_pose);
        if (convex_polygons_overlap(ego_poly, obs_poly)) {
          collided = true;
          collision_id = obs.id;
          // Model-gap classification: the exact rectangle overlaps while the
          // planner's two-circle covering reports clear.
          const Vec2 dir = unit_from_angle(sample.heading);
          const Vec2 front = sample.position + dir * quarter;
          const Vec2 rear = sample.position - dir * quarter;
          if (point_polygon_distance(front, obs_poly) >= circle_radius &&
              point_polygon_distance(rear, obs_poly) >= circle_radius) {
            model_gap = true;
          }
          break;
        }
      }
      if (collided) break;
    }

    if (collided) {
      record.event = "collision";
      trace.cycles.push_back(record);
      trace.events.push_back({cycle, SimEventKind::kCollision, collision_id});
      if (model_gap) {
        trace.events.push_back({cycle, SimEventKind::kModelGap, collision_id});
      }
      outcome = SimOutcome::kCollision;
      break;
    }

    // Advance the ego.
    world.ego.position = end_sample.position;
    world.ego.heading = end_sample.heading;
    world.ego.speed = std::max(end_sample.speed, 0.0);
    world.ego.accel = end_sample.accel;
    world.ego.curvature = end_sample.curvature;

    if (overridden) {
      record.event = verdict.level == GuardianLevel::kEmergencyStop
                         ? "guardian_emergency"
                         : "guardian_slowdown";
    } else if (traj.provenance == Provenance::kFallbackStop) {
      record.event = "fallback";
    }

    previous = *active;
    has_previous = true;

    // Goal check.
    const FrenetPose fp = line.to_frenet(world.ego.position);
    const bool at_goal = std::abs(fp.s - scenario.goal_s) < 0.5 &&
                         (through_goal || world.ego.speed < 0.1);
    if (at_goal) {
      record.event = record.event.empty() ? "goal_reached" : record.event;
      trace.cycles.push_back(record);
      trace.events.push_back({cycle, SimEventKind::kGoalReached, ""});
      outcome = SimOutcome::kGoalReached;
      trace.final_s = fp.s;
      trace.final_speed = world.ego.speed;
      break;
    }
    trace.cycles.push_back(record);
    trace.final_s = fp.s;
    trace.final_speed = world.ego.speed;

    // Persistent standstill away from the goal.
    if (world.ego.speed < 0.01) {
      ++stationary_cycles;
      if (stationary_cycles >= 100) {
        outcome = SimOutcome::kStopped;
        break;
      }
    } else {
      stationary_cycles = 0;
    }
  }

  if (outcome == SimOutcome::kTimeout && trace.final_speed < 0.1 &&
      !trace.cycles.empty()) {
    outcome = SimOutcome::kStopped;
  }
  trace.outcome = outcome;
  return trace;
}

BenchReport bench(const std::vector<std::pair<std::string, Scenario>>& scenarios,
                  int repetitions, int warmup, std::uint64_t seed) {
  BenchReport report;
  std::vector<size_t> order(scenarios.size());
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);

  std::vector<double> all_cycle, all_qp, all_path, all_speed;
  bool deterministic = true;
  int total_fallbacks = 0;
  int max_iters = 0;

  for (size_t idx : order) {
    const auto& [name, sc] = scenarios[idx];
    Trajectory prev;
    bool has_prev = false;
    for (int w = 0; w < warmup; ++w) {
      prev = plan_cycle(sc, has_prev ? &prev : nullptr);
      has_prev = true;
    }
    const Trajectory baseline = plan_cycle(sc, has_prev ? &prev : nullptr);

    BenchScenarioStats stats;
    stats.name = name;
    std::vector<double> cycle_t, qp_t, path_t, speed_t;
    cycle_t.reserve(repetitions);
    for (int r = 0; r < repetitions; ++r) {
      const Trajectory traj = plan_cycle(sc, has_prev ? &prev : nullptr);
      cycle_t.push_back(traj.diagnostics.t_total);
      const double qp =
          traj.diagnostics.t_path_solve + traj.diagnostics.t_speed_solve;
      qp_t.push_back(qp);
      path_t.push_back(traj.diagnostics.t_path_solve);
      speed_t.push_back(traj.diagnostics.t_speed_solve);
      if (traj.provenance == Provenance::kFallbackStop) ++stats.fallbacks;
      max_iters = std::max({max_iters, traj.diagnostics.path_iterations,
                            traj.diagnostics.speed_iterations});

      if (traj.samples.size() != baseline.samples.size()) {
        deterministic = false;
      } else {
        for (size_t i = 0; i < traj.samples.size(); ++i) {
          const TrajectorySample& a = traj.samples[i];
          const TrajectorySample& b = baseline.samples[i];
          if (a.position.x != b.position.x || a.position.y != b.position.y ||
              a.speed != b.speed) {
            deterministic = false;
            break;
          }
        }
      }
    }
    stats.samples = repetitions;
    stats.p50_cycle = percentile(cycle_t, 0.50);
    stats.p95_cycle = percentile(cycle_t, 0.95);
    stats.p99_cycle = percentile(cycle_t, 0.99);
    stats.p50_qp = percentile(qp_t, 0.50);
    stats.p95_qp = percentile(qp_t, 0.95);
    stats.p99_qp = percentile(qp_t, 0.99);
    stats.p50_path = percentile(path_t, 0.50);
    stats.p99_path = percentile(path_t, 0.99);
    stats.p50_speed = percentile(speed_t, 0.50);
    stats.p99_speed = percentile(speed_t, 0.99);
    stats.max_qp_iterations = max_iters;
    total_fallbacks += stats.fallbacks;
    report.per_scenario.push_back(stats);

    all_cycle.insert(all_cycle.end(), cycle_t.begin(), cycle_t.end());
    all_qp.insert(all_qp.end(), qp_t.begin(), qp_t.end());
    all_path.insert(all_path.end(), path_t.begin(), path_t.end());
    all_speed.insert(all_speed.end(), speed_t.begin(), speed_t.end());
  }

  // Keep per-scenario rows in input order for stable reports.
  std::sort(report.per_scenario.begin(), report.per_scenario.end(),
            [&](const BenchScenarioStats& a, const BenchScenarioStats& b) {
              return a.name < b.name;
            });

  report.aggregate.name = "aggregate";
  report.aggregate.samples = static_cast<int>(all_cycle.size());
  report.aggregate.p50_cycle = percentile(all_cycle, 0.50);
  report.aggregate.p95_cycle = percentile(all_cycle, 0.95);
  report.aggregate.p99_cycle = percentile(all_cycle, 0.99);
  report.aggregate.p50_qp = percentile(all_qp, 0.50);
  report.aggregate.p95_qp = percentile(all_qp, 0.95);
  report.aggregate.p99_qp = percentile(all_qp, 0.99);
  report.aggregate.p50_path = percentile(all_path, 0.50);
  report.aggregate.p99_path = percentile(all_path, 0.99);
  report.aggregate.p50_speed = percentile(all_speed, 0.50);
  report.aggregate.p99_speed = percentile(all_speed, 0.99);
  report.aggregate.fallbacks = total_fallbacks;
  report.aggregate.max_qp_iterations = max_iters;

  report.qp_gate_passed = report.aggregate.p99_qp <= report.qp_budget;
  report.cycle_gate_passed = report.aggregate.p99_cycle <= report.cycle_budget;
  report.deterministic = deterministic;
  return report;
}

}  // namespace corridor
