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
#include <string>
#include <vector>

#include "corridor/bounds.hpp"
#include "corridor/common.hpp"
#include "corridor/prediction.hpp"
#include "corridor/scenario.hpp"

namespace corridor {

class NoRoom : public Error {
 public:
  explicit NoRoom(const std::string& msg) : Error("NoRoom", msg) {}
};

class AllBlocked : public Error {
 public:
  explicit AllBlocked(const std::string& msg) : Error("AllBlocked", msg) {}
};

class TunnelCollapse : public Error {
 public:
  explicit TunnelCollapse(const std::string& msg)
      : Error("TunnelCollapse", msg) {}
};

class StInfeasible : public Error {
 public:
  explicit StInfeasible(const std::string& msg) : Error("StInfeasible", msg) {}
};

enum class DecisionLabel { kYield, kOvertake, kBypassLeft, kBypassRight, kIgnore };

const char* decision_label_name(DecisionLabel label);

// Sampled s-l graph. Station 0 is pinned at the ego's current (s, l) as the
// single sample; later stations carry symmetric lateral offsets clipped to
// the drivable band.
struct Lattice {
  std::vector<double> stations;
  std::vector<std::vector<double>> lateral;  // samples per station
  double ego_l = 0.0;
  double ego_dl_ds = 0.0;
};

struct SlNode {
  double s = 0.0;
  double l = 0.0;
};

struct CoarseTrajectory {
  std::vector<SlNode> nodes;  // one per lattice station
  std::map<std::string, DecisionLabel> decisions;
  double total_cost = 0.0;
};

// Axis-aligned box in the s-l sheet.
struct SlBox {
  double s_min = 0.0;
  double s_max = 0.0;
  double l_min = 0.0;
  double l_max = 0.0;

  bool valid() const { return s_max >= s_min && l_max >= l_min; }
};

/// Precomputed edge-cost evaluation shared by dp_search and the exhaustive
/// test oracle, so both walk the exact same floating-point path.
class DpCostModel {
 public:
  DpCostModel(const Lattice& lattice,
              const std::vector<PredictedTrajectory>& predictions,
              const Scenario& scenario);

  int station_count() const { return static_cast<int>(stations_.size()); }
  int sample_count(int station) const {
    return static_cast<int>(lateral_[station].size());
  }
  double lateral_at(int station, int index) const {
    return lateral_[station][index];
  }
  double station_at(int k) const { return stations_[k]; }
  double nominal_time_at(int k) const { return times_[k]; }
  double ghost_l() const { return ghost_l_; }

  // Cost of the edge into station k (from station k-1), where l_km2 is the
  // lateral value two stations back (the ghost for k = 1). Returns infinity
  // for blocked edges.
  double edge_cost(int k, double l_km2, double l_km1, double l_k) const;

  // Same cost addressed by sample indices (k >= 2).
  double edge_cost_by_index(int k, int idx_km2, int idx_km1, int idx_k) const;
  // First stage (k = 1): predecessor chain is the pinned ego node + ghost.
  double first_edge_cost(int idx_1) const;

  // Inflated obstacle box used for blocking at the given station (by the
  // station's nominal traversal time).
  const SlBox& inflated_box(size_t obstacle, int station) const {
    return inflated_[obstacle][station];
  }
  const SlBox& raw_box(size_t obstacle, int station) const {
    return raw_[obstacle][station];
  }

 private:
  double obstacle_and_reference_cost(int k, double l_km1, double l_k) const;

  std::vector<double> stations_;
  std::vector<std::vector<double>> lateral_;
  std::vector<double> times_;
  double ghost_l_ = 0.0;
  double delta_s_ = 0.0;
  double w_obs_ = 0.0, w_ref_ = 0.0, w_smooth_ = 0.0, w_kappa_ = 0.0;
  std::vector<std::vector<SlBox>> inflated_;  // [obstacle][station]
  std::vector<std::vector<SlBox>> raw_;
  std::vector<std::vector<double>> sigma_infl_;  // [obstacle][station]
  // base cost cache: per station k, [idx_km1][idx_k]
  std::vector<std::vector<double>> base_cache_;
  std::vector<int> base_stride_;
};

Lattice build_lattice(const Scenario& scenario);

CoarseTrajectory dp_search(const Lattice& lattice,
                           const std::vector<PredictedTrajectory>& predictions,
                           const Scenario& scenario);

// Lateral feasible band per path-grid station. Bypass decisions tighten the
// road bounds; yield/overtake/ignore obstacles do not contribute (they are
// handled in the time domain).
Tunnel extract_tunnel(const CoarseTrajectory& coarse, const Scenario& scenario,
                      const std::vector<PredictedTrajectory>& predictions);

// Sampled pose of the final planned path, input to the s-t sweep.
struct PathPoint {
  double s = 0.0;
  Vec2 position;
  double heading = 0.0;
};

StConstraintSet extract_st_constraints(
    const CoarseTrajectory& coarse, const std::vector<PathPoint>& path,
    const std::vector<PredictedTrajectory>& predictions,
    const Scenario& scenario);

// Frenet bounding box of an obstacle footprint at a predicted pose.
SlBox footprint_sl_box(const Polygon& body, const Pose2d& pose,
                       const ReferenceLine& line);

// Exact distance between an s-l segment and a box (0 when intersecting).
double segment_box_distance(double s0, double l0, double s1, double l1,
                            const SlBox& box);

}  // namespace corridor
