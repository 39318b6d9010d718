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

#include "corridor/decision.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace corridor {

namespace {

constexpr double kInfCost = std::numeric_limits<double>::infinity();
constexpr double kIgnoreLateralThreshold = 3.0;  // m

double nominal_speed(const Scenario& sc) {
  return clamp(sc.ego.speed, 1.0, sc.vehicle.max_speed);
}

double interval_distance(double v, double lo, double hi) {
  if (v < lo) return lo - v;
  if (v > hi) return v - hi;
  return 0.0;
}

// Tie-break key: smaller |l|, then smaller l.
bool lateral_key_less(double a, double b) {
  const double aa = std::abs(a);
  const double ab = std::abs(b);
  if (aa != ab) return aa < ab;
  return a < b;
}

}  // namespace

const char* decision_label_name(DecisionLabel label) {
  switch (label) {
    case DecisionLabel::kYield:
      return "yield";
    case DecisionLabel::kOvertake:
      return "overtake";
    case DecisionLabel::kBypassLeft:
      return "bypass_left";
    case DecisionLabel::kBypassRight:
      return "bypass_right";
    case DecisionLabel::kIgnore:
      return "ignore";
  }
  return "?";
}

SlBox footprint_sl_box(const Polygon& body, const Pose2d& pose,
                       const ReferenceLine& line) {
  SlBox box;
  box.s_min = box.l_min = std::numeric_limits<double>::infinity();
  box.s_max = box.l_max = -std::numeric_limits<double>::infinity();
  for (const Vec2& v : body) {
    const FrenetPose fp = line.to_frenet(pose.to_world(v));
    box.s_min = std::min(box.s_min, fp.s);
    box.s_max = std::max(box.s_max, fp.s);
    box.l_min = std::min(box.l_min, fp.l);
    box.l_max = std::max(box.l_max, fp.l);
  }
  return box;
}

double segment_box_distance(double s0, double l0, double s1, double l1,
                            const SlBox& box) {
  const Polygon seg = {{s0, l0}, {s1, l1}};
  const Polygon rect = {{box.s_min, box.l_min},
                        {box.s_max, box.l_min},
                        {box.s_max, box.l_max},
                        {box.s_min, box.l_max}};
  if (convex_polygons_overlap(seg, rect)) return 0.0;

  auto point_box = [&](double s, double l) {
    const double ds = interval_distance(s, box.s_min, box.s_max);
    const double dl = interval_distance(l, box.l_min, box.l_max);
    return std::hypot(ds, dl);
  };
  double best = std::min(point_box(s0, l0), point_box(s1, l1));
  const Vec2 a{s0, l0}, b{s1, l1};
  for (const Vec2& corner : rect) {
    best = std::min(best, point_segment_distance(corner, a, b));
  }
  return best;
}

Lattice build_lattice(const Scenario& sc) {
  const ReferenceLine& line = sc.reference_line;
  const FrenetPose ego = line.to_frenet_state(
      {sc.ego.position, sc.ego.heading, sc.ego.curvature});

  const double bound = sc.road_half_width - sc.vehicle.width / 2.0;
  if (bound < 0.0) {
    throw NoRoom("road half-width " + std::to_string(sc.road_half_width) +
                 " leaves no room for vehicle width " +
                 std::to_string(sc.vehicle.width));
  }

  const double horizon_end =
      std::min(sc.goal_s, ego.s + sc.config.path_horizon);
  const double span = std::max(horizon_end - ego.s, 1e-3);
  const int n = sc.config.path_grid_count;

  Lattice lattice;
  lattice.ego_l = ego.l;
  lattice.ego_dl_ds = ego.dl_ds;
  lattice.stations.resize(n + 1);
  lattice.lateral.resize(n + 1);
  const double step = span / n;
  for (int k = 0; k <= n; ++k) lattice.stations[k] = ego.s + k * step;

  lattice.lateral[0] = {ego.l};
  std::vector<double> offsets;
  const int half = (sc.config.lateral_sample_count - 1) / 2;
  for (int i = -half; i <= half; ++i) {
    const double l = i * sc.config.lateral_sample_spacing;
    if (std::abs(l) <= bound + 1e-9) offsets.push_back(l);
  }
  if (offsets.empty()) offsets.push_back(0.0);
  for (int k = 1; k <= n; ++k) lattice.lateral[k] = offsets;
  return lattice;
}

// ---------------------------------------------------------------------------
// DpCostModel
// ---------------------------------------------------------------------------

DpCostModel::DpCostModel(const Lattice& lattice,
                         const std::vector<PredictedTrajectory>& predictions,
                         const Scenario& sc)
    : stations_(lattice.stations),
      lateral_(lattice.lateral),
      ghost_l_(lattice.ego_l - (lattice.stations.size() > 1
                                    ? (lattice.stations[1] - lattice.stations[0])
                                    : 1.0) *
                                   lattice.ego_dl_ds),
      w_obs_(sc.config.dp_w_obs),
      w_ref_(sc.config.dp_w_ref),
      w_smooth_(sc.config.dp_w_smooth),
      w_kappa_(sc.config.dp_w_kappa) {
  const int m = station_count();
  delta_s_ = m > 1 ? stations_[1] - stations_[0] : 1.0;
  const double v_est = nominal_speed(sc);
  times_.resize(m);
  for (int k = 0; k < m; ++k) times_[k] = (stations_[k] - stations_[0]) / v_est;

  // Station-range inflation of at least half a grid step guarantees that the
  // station nearest any physical obstacle point carries its bound.
  const double half_len = std::max(sc.vehicle.length / 2.0, delta_s_ / 2.0);
  const double lat_inflate = sc.vehicle.width / 2.0 + sc.config.lateral_margin;

  inflated_.resize(predictions.size());
  raw_.resize(predictions.size());
  sigma_infl_.resize(predictions.size());
  for (size_t o = 0; o < predictions.size(); ++o) {
    const PredictedTrajectory& pred = predictions[o];
    const Obstacle* obstacle = nullptr;
    for (const Obstacle& candidate : sc.obstacles) {
      if (candidate.id == pred.obstacle_id) {
        obstacle = &candidate;
        break;
      }
    }
    inflated_[o].resize(m);
    raw_[o].resize(m);
    sigma_infl_[o].resize(m);
    for (int k = 0; k < m; ++k) {
      const PredictionSample sample = pred.at(times_[k]);
      const SlBox raw =
          obstacle != nullptr
              ? footprint_sl_box(obstacle->footprint,
                                 {sample.position, sample.heading},
                                 sc.reference_line)
              : SlBox{};
      raw_[o][k] = raw;
      SlBox inflated = raw;
      inflated.s_min -= half_len;
      inflated.s_max += half_len;
      inflated.l_min -= lat_inflate;
      inflated.l_max += lat_inflate;
      inflated_[o][k] = inflated;
      sigma_infl_[o][k] = sc.config.dp_sigma_geom + sample.sigma;
    }
  }

  // Base (obstacle + reference + smoothness) cost cache per edge.
  base_cache_.resize(m);
  base_stride_.resize(m, 0);
  for (int k = 1; k < m; ++k) {
    const int kp = static_cast<int>(lateral_[k - 1].size());
    const int kc = static_cast<int>(lateral_[k].size());
    base_stride_[k] = kc;
    base_cache_[k].resize(static_cast<size_t>(kp) * kc);
    for (int p = 0; p < kp; ++p) {
      for (int c = 0; c < kc; ++c) {
        base_cache_[k][static_cast<size_t>(p) * kc + c] =
            obstacle_and_reference_cost(k, lateral_[k - 1][p], lateral_[k][c]);
      }
    }
  }
}

double DpCostModel::obstacle_and_reference_cost(int k, double l_km1,
                                                double l_k) const {
  const double s_prev = stations_[k - 1];
  const double s_cur = stations_[k];
  double obstacle_cost = 0.0;
  for (size_t o = 0; o < inflated_.size(); ++o) {
    const SlBox& box = inflated_[o][k];
    if (!box.valid()) continue;
    const double d = segment_box_distance(s_prev, l_km1, s_cur, l_k, box);
    if (d <= 0.0) return kInfCost;
    const double sigma = sigma_infl_[o][k];
    obstacle_cost += std::exp(-d * d / (2.0 * sigma * sigma));
  }
  const double slope = (l_k - l_km1) / delta_s_;
  return w_obs_ * obstacle_cost + w_ref_ * l_k * l_k + w_smooth_ * slope * slope;
}

double DpCostModel::edge_cost(int k, double l_km2, double l_km1,
                              double l_k) const {
  const double base = obstacle_and_reference_cost(k, l_km1, l_k);
  if (base == kInfCost) return kInfCost;
  const double curv = (l_k - 2.0 * l_km1 + l_km2) / (delta_s_ * delta_s_);
  return base + w_kappa_ * curv * curv;
}

double DpCostModel::edge_cost_by_index(int k, int idx_km2, int idx_km1,
                                       int idx_k) const {
  const double base =
      base_cache_[k][static_cast<size_t>(idx_km1) * base_stride_[k] + idx_k];
  if (base == kInfCost) return kInfCost;
  const double l_km2 =
      idx_km2 < 0 ? ghost_l_ : lateral_[k - 2][static_cast<size_t>(idx_km2)];
  const double l_km1 = lateral_[k - 1][static_cast<size_t>(idx_km1)];
  const double l_k = lateral_[k][static_cast<size_t>(idx_k)];
  const double curv = (l_k - 2.0 * l_km1 + l_km2) / (delta_s_ * delta_s_);
  return base + w_kappa_ * curv * curv;
}

double DpCostModel::first_edge_cost(int idx_1) const {
  return edge_cost_by_index(1, -1, 0, idx_1);
}

// ---------------------------------------------------------------------------
// dp_search
// ---------------------------------------------------------------------------

namespace {

struct DpStage {
  // value[p * kc + c]: best cost reaching state (sample p at k-1, sample c at k)
  std::vector<double> value;
  std::vector<int> parent;  // index pp at k-2 (or -1)
  int kp = 0;
  int kc = 0;
};

void assign_labels(CoarseTrajectory& coarse, const DpCostModel& model,
                   const std::vector<PredictedTrajectory>& predictions,
                   const Scenario& sc) {
  const int m = model.station_count();
  const double half_len = sc.vehicle.length / 2.0;
  const double corridor = sc.vehicle.width / 2.0 + sc.config.lateral_margin;
  const double v_est = nominal_speed(sc);
  const double s0 = coarse.nodes.front().s;

  for (size_t o = 0; o < predictions.size(); ++o) {
    const PredictedTrajectory& pred = predictions[o];
    const Obstacle* obstacle = nullptr;
    for (const Obstacle& candidate : sc.obstacles) {
      if (candidate.id == pred.obstacle_id) obstacle = &candidate;
    }
    if (obstacle == nullptr) continue;

    bool moving = false;
    switch (obstacle->motion.type) {
      case MotionType::kStatic:
        moving = false;
        break;
      case MotionType::kConstantVelocity:
        moving = std::abs(obstacle->motion.speed) > 1e-9;
        break;
      case MotionType::kLaneFollow:
        moving = std::abs(obstacle->motion.lane_speed) > 1e-9;
        break;
      case MotionType::kScripted:
        moving = obstacle->motion.script.size() > 1;
        break;
    }

    // A moving obstacle whose footprint crosses the coarse path corridor at
    // some time gets a temporal label (yield/overtake); purely lateral
    // relations get spatial labels below.
    if (moving) {
      bool conflict = false;
      double t_occ = 0.0;
      int conflict_station = -1;
      for (const PredictionSample& sample : pred.samples) {
        const SlBox box = footprint_sl_box(
            obstacle->footprint, {sample.position, sample.heading},
            sc.reference_line);
        for (int k = 1; k < m && !conflict; ++k) {
          const double s_k = model.station_at(k);
          if (s_k < box.s_min - half_len || s_k > box.s_max + half_len) continue;
          const double node_l = coarse.nodes[k].l;
          if (node_l + corridor >= box.l_min && node_l - corridor <= box.l_max) {
            conflict = true;
            t_occ = sample.t;
            conflict_station = k;
          }
        }
        if (conflict) break;
      }
      if (conflict) {
        const double t_arr =
            (model.station_at(conflict_station) - s0) / v_est;
        coarse.decisions[obstacle->id] = t_arr > t_occ
                                             ? DecisionLabel::kYield
                                             : DecisionLabel::kOvertake;
        continue;
      }
    }

    // Spatial relation against the per-station boxes at nominal times.
    std::vector<int> overlapping;
    for (int k = 1; k < m; ++k) {
      const SlBox& box = model.raw_box(o, k);
      if (!box.valid()) continue;
      const double s_k = model.station_at(k);
      if (s_k >= box.s_min - half_len && s_k <= box.s_max + half_len) {
        overlapping.push_back(k);
      }
    }
    if (overlapping.empty()) {
      coarse.decisions[obstacle->id] = DecisionLabel::kIgnore;
      continue;
    }
    double min_lateral = std::numeric_limits<double>::infinity();
    bool all_left = true;
    bool all_right = true;
    for (int k : overlapping) {
      const SlBox& box = model.raw_box(o, k);
      const double node_l = coarse.nodes[k].l;
      min_lateral =
          std::min(min_lateral, interval_distance(node_l, box.l_min, box.l_max));
      all_left = all_left && node_l >= box.l_max;
      all_right = all_right && node_l <= box.l_min;
    }
    if (min_lateral > kIgnoreLateralThreshold) {
      coarse.decisions[obstacle->id] = DecisionLabel::kIgnore;
    } else if (all_left) {
      coarse.decisions[obstacle->id] = DecisionLabel::kBypassLeft;
    } else if (all_right) {
      coarse.decisions[obstacle->id] = DecisionLabel::kBypassRight;
    } else {
      coarse.decisions[obstacle->id] = DecisionLabel::kYield;
    }
  }
}

}  // namespace

CoarseTrajectory dp_search(const Lattice& lattice,
                           const std::vector<PredictedTrajectory>& predictions,
                           const Scenario& sc) {
  const DpCostModel model(lattice, predictions, sc);
  const int m = model.station_count();

  std::vector<DpStage> stages(m);
  // Stage k >= 1 holds states (sample at k-1, sample at k); stage 1 has a
  // single predecessor (the pinned ego node).
  for (int k = 1; k < m; ++k) {
    DpStage& stage = stages[k];
    stage.kp = model.sample_count(k - 1);
    stage.kc = model.sample_count(k);
    stage.value.assign(static_cast<size_t>(stage.kp) * stage.kc, kInfCost);
    stage.parent.assign(stage.value.size(), -1);
  }

  int farthest = 0;
  if (m > 1) {
    DpStage& first = stages[1];
    for (int c = 0; c < first.kc; ++c) {
      first.value[c] = model.first_edge_cost(c);
      if (first.value[c] < kInfCost) farthest = 1;
    }
  }
  for (int k = 2; k < m; ++k) {
    const DpStage& prev = stages[k - 1];
    DpStage& cur = stages[k];
    bool any = false;
    for (int p = 0; p < cur.kp; ++p) {
      for (int c = 0; c < cur.kc; ++c) {
        double best = kInfCost;
        int best_pp = -1;
        for (int pp = 0; pp < prev.kp; ++pp) {
          const double upstream = prev.value[static_cast<size_t>(pp) * prev.kc + p];
          if (upstream == kInfCost) continue;
          const double edge = model.edge_cost_by_index(k, pp, p, c);
          if (edge == kInfCost) continue;
          const double total = upstream + edge;
          if (total < best ||
              (total == best && best_pp >= 0 &&
               lateral_key_less(model.lateral_at(k - 2, pp),
                                model.lateral_at(k - 2, best_pp)))) {
            best = total;
            best_pp = pp;
          }
        }
        cur.value[static_cast<size_t>(p) * cur.kc + c] = best;
        cur.parent[static_cast<size_t>(p) * cur.kc + c] = best_pp;
        any = any || best < kInfCost;
      }
    }
    if (any) farthest = k;
  }

  if (m > 1 && farthest == 0) {
    throw AllBlocked("no feasible first move from the ego station");
  }

  CoarseTrajectory coarse;
  coarse.nodes.resize(m);
  for (int k = 0; k < m; ++k) {
    coarse.nodes[k].s = model.station_at(k);
  }
  coarse.nodes[0].l = lattice.ego_l;

  if (m > 1) {
    // Terminal pick at the farthest reachable stage: cost, then reverse
    // lateral keys (last node first).
    const DpStage& terminal = stages[farthest];
    double best = kInfCost;
    int best_p = -1, best_c = -1;
    for (int p = 0; p < terminal.kp; ++p) {
      for (int c = 0; c < terminal.kc; ++c) {
        const double v = terminal.value[static_cast<size_t>(p) * terminal.kc + c];
        if (v == kInfCost) continue;
        bool take = false;
        if (v < best) {
          take = true;
        } else if (v == best) {
          const double lc = model.lateral_at(farthest, c);
          const double lp = model.lateral_at(farthest - 1, p);
          const double blc = model.lateral_at(farthest, best_c);
          const double blp = model.lateral_at(farthest - 1, best_p);
          if (lateral_key_less(lc, blc) ||
              (lc == blc && lateral_key_less(lp, blp))) {
            take = true;
          }
        }
        if (take) {
          best = v;
          best_p = p;
          best_c = c;
        }
      }
    }
    coarse.total_cost = best;

    std::vector<int> chosen(m, -1);
    chosen[farthest] = best_c;
    if (farthest >= 1) chosen[farthest - 1] = best_p;
    for (int k = farthest; k >= 2; --k) {
      const DpStage& stage = stages[k];
      const int p = chosen[k - 1];
      const int c = chosen[k];
      chosen[k - 2] = stage.parent[static_cast<size_t>(p) * stage.kc + c];
    }
    for (int k = 1; k <= farthest; ++k) {
      coarse.nodes[k].l = model.lateral_at(k, chosen[k]);
    }
    // Blocked beyond `farthest`: hold the last reachable offset; the speed
    // layer stops the vehicle before the blockage.
    for (int k = farthest + 1; k < m; ++k) {
      coarse.nodes[k].l = coarse.nodes[farthest].l;
    }
  }

  assign_labels(coarse, model, predictions, sc);
  return coarse;
}

// ---------------------------------------------------------------------------
// extract_tunnel
// ---------------------------------------------------------------------------

Tunnel extract_tunnel(const CoarseTrajectory& coarse, const Scenario& sc,
                      const std::vector<PredictedTrajectory>& predictions) {
  const int n = static_cast<int>(coarse.nodes.size()) - 1;
  Tunnel tunnel;
  tunnel.l_lower.assign(n, -sc.road_half_width);
  tunnel.l_upper.assign(n, sc.road_half_width);

  // Rebuild the per-station boxes the decision used (nominal times).
  const double v_est = nominal_speed(sc);
  const double spacing =
      n >= 1 ? coarse.nodes[1].s - coarse.nodes[0].s : 1.0;
  const double half_len = std::max(sc.vehicle.length / 2.0, spacing / 2.0);
  const double margin = sc.config.lateral_margin;
  const double s0 = coarse.nodes.front().s;

  for (const auto& [id, label] : coarse.decisions) {
    if (label != DecisionLabel::kBypassLeft &&
        label != DecisionLabel::kBypassRight) {
      continue;
    }
    const Obstacle* obstacle = nullptr;
    for (const Obstacle& candidate : sc.obstacles) {
      if (candidate.id == id) obstacle = &candidate;
    }
    const PredictedTrajectory* pred = nullptr;
    for (const PredictedTrajectory& p : predictions) {
      if (p.obstacle_id == id) pred = &p;
    }
    if (obstacle == nullptr || pred == nullptr) continue;

    for (int i = 1; i <= n; ++i) {
      const double s_i = coarse.nodes[i].s;
      const double t_i = (s_i - s0) / v_est;
      const PredictionSample sample = pred->at(t_i);
      const SlBox box = footprint_sl_box(
          obstacle->footprint, {sample.position, sample.heading},
          sc.reference_line);
      if (s_i < box.s_min - half_len || s_i > box.s_max + half_len) continue;
      if (label == DecisionLabel::kBypassLeft) {
        tunnel.l_lower[i - 1] = std::max(tunnel.l_lower[i - 1], box.l_max + margin);
      } else {
        tunnel.l_upper[i - 1] = std::min(tunnel.l_upper[i - 1], box.l_min - margin);
      }
    }
  }

  for (int i = 1; i <= n; ++i) {
    const double lo = tunnel.l_lower[i - 1];
    const double hi = tunnel.l_upper[i - 1];
    if (hi - lo < sc.vehicle.width) {
      throw TunnelCollapse("tunnel narrower than vehicle at station " +
                           std::to_string(i));
    }
    const double node_l = coarse.nodes[i].l;
    if (node_l < lo + 0.01 - 1e-12 || node_l > hi - 0.01 + 1e-12) {
      throw TunnelCollapse("coarse node outside tunnel at station " +
                           std::to_string(i));
    }
  }
  return tunnel;
}

// ---------------------------------------------------------------------------
// extract_st_constraints
// ---------------------------------------------------------------------------

StConstraintSet extract_st_constraints(
    const CoarseTrajectory& coarse, const std::vector<PathPoint>& path,
    const std::vector<PredictedTrajectory>& predictions, const Scenario& sc) {
  const int n = sc.config.speed_grid_count;
  const double dt = sc.config.speed_horizon / n;
  const double s0 = path.empty() ? coarse.nodes.front().s : path.front().s;

  StConstraintSet st;
  st.s_lower.assign(n, s0);
  st.s_upper.assign(n, sc.goal_s);

  const double quarter = sc.vehicle.length / 4.0;
  const double radius = std::hypot(quarter, sc.vehicle.width / 2.0);

  for (const auto& [id, label] : coarse.decisions) {
    if (label != DecisionLabel::kYield && label != DecisionLabel::kOvertake) {
      continue;
    }
    const Obstacle* obstacle = nullptr;
    for (const Obstacle& candidate : sc.obstacles) {
      if (candidate.id == id) obstacle = &candidate;
    }
    const PredictedTrajectory* pred = nullptr;
    for (const PredictedTrajectory& p : predictions) {
      if (p.obstacle_id == id) pred = &p;
    }
    if (obstacle == nullptr || pred == nullptr) continue;

    double body_radius = 0.0;
    for (const Vec2& v : obstacle->footprint) {
      body_radius = std::max(body_radius, v.norm());
    }
    const double prune = body_radius + radius + 0.5;

    for (int j = 1; j <= n; ++j) {
      const double t = j * dt;
      const PredictionSample sample = pred->at(t);
      const Polygon poly = transform_polygon(
          obstacle->footprint, {sample.position, sample.heading});
      double blocked_lo = std::numeric_limits<double>::infinity();
      double blocked_hi = -std::numeric_limits<double>::infinity();
      for (const PathPoint& pt : path) {
        if ((pt.position - sample.position).norm() > prune) continue;
        const Vec2 dir = unit_from_angle(pt.heading);
        const Vec2 front = pt.position + dir * quarter;
        const Vec2 rear = pt.position - dir * quarter;
        if (point_polygon_distance(front, poly) < radius ||
            point_polygon_distance(rear, poly) < radius) {
          blocked_lo = std::min(blocked_lo, pt.s);
          blocked_hi = std::max(blocked_hi, pt.s);
        }
      }
      if (blocked_lo > blocked_hi) continue;  // no overlap at this time
      if (label == DecisionLabel::kYield) {
        st.s_upper[j - 1] =
            std::min(st.s_upper[j - 1], blocked_lo - sc.config.margin_long);
      } else {
        st.s_lower[j - 1] =
            std::max(st.s_lower[j - 1], blocked_hi + sc.config.margin_long);
      }
    }
  }

  // A vehicle cannot be forced backward: propagate the tightest future upper
  // bound to earlier times.
  for (int j = n - 2; j >= 0; --j) {
    st.s_upper[j] = std::min(st.s_upper[j], st.s_upper[j + 1]);
  }

  // Overtake reachability under the acceleration limit.
  const double v0 = sc.ego.speed;
  const double a = sc.vehicle.max_accel;
  const double vmax = sc.vehicle.max_speed;
  const double t_acc = (vmax - v0) / a;
  for (int j = 0; j < n; ++j) {
    const double t = (j + 1) * dt;
    const double reach =
        t <= t_acc ? s0 + v0 * t + 0.5 * a * t * t
                   : s0 + v0 * t_acc + 0.5 * a * t_acc * t_acc + vmax * (t - t_acc);
    if (st.s_lower[j] > reach + 1e-9) {
      throw StInfeasible("overtake bound unreachable at t=" +
                         std::to_string(t));
    }
    if (st.s_lower[j] > st.s_upper[j] + 1e-12) {
      throw StInfeasible("s-t bounds cross at t=" + std::to_string(t));
    }
  }
  return st;
}

}  // namespace corridor
