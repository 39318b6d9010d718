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

#include <vector>

#include "corridor/common.hpp"
#include "corridor/polygon.hpp"

namespace corridor {

class DegeneratePolyline : public Error {
 public:
  explicit DegeneratePolyline(const std::string& msg)
      : Error("DegeneratePolyline", msg) {}
};

class AmbiguousProjection : public Error {
 public:
  explicit AmbiguousProjection(const std::string& msg)
      : Error("AmbiguousProjection", msg) {}
};

class StationOutOfRange : public Error {
 public:
  explicit StationOutOfRange(const std::string& msg)
      : Error("StationOutOfRange", msg) {}
};

// Longitudinal/lateral pose relative to a ReferenceLine. `l` is positive to
// the left of the centerline; `dl_ds` and `ddl_ds2` are derivatives of the
// lateral offset with respect to station.
struct FrenetPose {
  double s = 0.0;
  double l = 0.0;
  double dl_ds = 0.0;
  double ddl_ds2 = 0.0;
};

// Cartesian state used when converting full vehicle states.
struct CartesianState {
  Vec2 position;
  double heading = 0.0;
  double curvature = 0.0;
};

/// Arc-length-parametrized lane centerline.
///
/// The line is a polyline with a continuous interpolated normal field:
/// lateral displacement at station s follows the normalized linear blend of
/// the two surrounding vertex normals. to_frenet inverts that construction
/// exactly (per-segment closed form), so conversions round-trip to machine
/// precision for offsets below the minimum turning radius.
class ReferenceLine {
 public:
  // Empty line; populate via from_polyline before use.
  ReferenceLine() = default;

  // Builds the parametrization from an ordered polyline. Consecutive points
  // closer than 1e-9 m are merged. Throws DegeneratePolyline when fewer than
  // two distinct points remain or the polyline doubles back on itself.
  static ReferenceLine from_polyline(const std::vector<Vec2>& polyline);

  const std::vector<Vec2>& points() const { return points_; }
  const std::vector<double>& stations() const { return s_; }
  const std::vector<double>& headings() const { return heading_; }
  const std::vector<double>& curvatures() const { return curvature_; }

  double total_length() const { return s_.back(); }
  double min_turning_radius() const;

  Vec2 point_at(double s) const;
  Vec2 normal_at(double s) const;
  double heading_at(double s) const;
  double curvature_at(double s) const;
  // Derivative of centerline curvature with respect to station.
  double curvature_rate_at(double s) const;

  // Projects a Cartesian point onto the line. The returned pose has
  // dl_ds = ddl_ds2 = 0 (a point carries no path derivative information).
  // Throws AmbiguousProjection when two projections tie within 1e-9 m at
  // stations more than 1 m apart. Points beyond the ends clamp to the
  // endpoint station with l measured against the endpoint normal.
  FrenetPose to_frenet(const Vec2& position) const;

  // Maps (s, l) back to Cartesian. heading_out = line heading + atan(dl_ds).
  // Throws StationOutOfRange for s outside [0, total_length].
  Vec2 from_frenet(const FrenetPose& pose, double* heading_out = nullptr) const;

  // Full state conversions (position, heading, curvature) <-> (s, l, l', l'').
  FrenetPose to_frenet_state(const CartesianState& state) const;
  CartesianState from_frenet_state(const FrenetPose& pose) const;

 private:
  // Locates the segment index containing station s (clamped).
  size_t segment_index(double s) const;

  std::vector<Vec2> points_;
  std::vector<double> s_;
  std::vector<double> heading_;
  std::vector<double> curvature_;
  std::vector<Vec2> vertex_normal_;  // unit left normals per vertex
};

// Three-point Menger curvature (signed, via the circumscribed circle).
double menger_curvature(const Vec2& a, const Vec2& b, const Vec2& c);

}  // namespace corridor
