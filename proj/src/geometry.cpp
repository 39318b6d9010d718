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

#include "corridor/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace corridor {

namespace {

constexpr double kMergeEpsilon = 1e-9;
constexpr double kStationSlack = 1e-9;

struct Candidate {
  double foot_distance = std::numeric_limits<double>::infinity();
  double s = 0.0;
  double l = 0.0;
};

}  // namespace

double menger_curvature(const Vec2& a, const Vec2& b, const Vec2& c) {
  const Vec2 ab = b - a;
  const Vec2 bc = c - b;
  const Vec2 ac = c - a;
  const double denom = ab.norm() * bc.norm() * ac.norm();
  if (denom < 1e-18) return 0.0;
  return 2.0 * ab.cross(bc) / denom;
}

ReferenceLine ReferenceLine::from_polyline(const std::vector<Vec2>& polyline) {
  ReferenceLine line;
  for (const Vec2& p : polyline) {
    if (line.points_.empty() ||
        (p - line.points_.back()).norm() > kMergeEpsilon) {
      line.points_.push_back(p);
    }
  }
  const size_t n = line.points_.size();
  if (n < 2) {
    throw DegeneratePolyline("need at least 2 distinct points, got " +
                             std::to_string(n));
  }

  line.s_.resize(n);
  line.s_[0] = 0.0;
  for (size_t i = 1; i < n; ++i) {
    line.s_[i] = line.s_[i - 1] + (line.points_[i] - line.points_[i - 1]).norm();
  }

  // Per-vertex tangents: average of adjacent segment directions.
  std::vector<Vec2> tangents(n);
  for (size_t i = 0; i < n; ++i) {
    Vec2 t{0, 0};
    if (i > 0) t += (line.points_[i] - line.points_[i - 1]).normalized();
    if (i + 1 < n) t += (line.points_[i + 1] - line.points_[i]).normalized();
    t = t.normalized();
    if (t.norm() < 0.5) {
      throw DegeneratePolyline("polyline doubles back at vertex " +
                               std::to_string(i));
    }
    tangents[i] = t;
  }

  line.heading_.resize(n);
  line.vertex_normal_.resize(n);
  for (size_t i = 0; i < n; ++i) {
    line.heading_[i] = std::atan2(tangents[i].y, tangents[i].x);
    line.vertex_normal_[i] = tangents[i].left_normal();
  }
  for (size_t i = 1; i < n; ++i) {
    const double jump = std::abs(angle_diff(line.heading_[i], line.heading_[i - 1]));
    if (jump > M_PI - 1e-6) {
      throw DegeneratePolyline("heading jump of " + std::to_string(jump) +
                               " rad at vertex " + std::to_string(i));
    }
  }

  line.curvature_.resize(n);
  if (n == 2) {
    line.curvature_[0] = line.curvature_[1] = 0.0;
  } else {
    for (size_t i = 1; i + 1 < n; ++i) {
      line.curvature_[i] = menger_curvature(line.points_[i - 1], line.points_[i],
                                            line.points_[i + 1]);
    }
    line.curvature_[0] = line.curvature_[1];
    line.curvature_[n - 1] = line.curvature_[n - 2];
  }
  return line;
}

double ReferenceLine::min_turning_radius() const {
  double max_kappa = 0.0;
  for (double k : curvature_) max_kappa = std::max(max_kappa, std::abs(k));
  return max_kappa > 0.0 ? 1.0 / max_kappa
                         : std::numeric_limits<double>::infinity();
}

size_t ReferenceLine::segment_index(double s) const {
  if (s <= s_.front()) return 0;
  if (s >= s_.back()) return points_.size() - 2;
  const auto it = std::upper_bound(s_.begin(), s_.end(), s);
  return static_cast<size_t>(it - s_.begin()) - 1;
}

Vec2 ReferenceLine::point_at(double s) const {
  const size_t i = segment_index(s);
  const double t = (s - s_[i]) / (s_[i + 1] - s_[i]);
  return points_[i] + (points_[i + 1] - points_[i]) * t;
}

Vec2 ReferenceLine::normal_at(double s) const {
  const size_t i = segment_index(s);
  const double t = (s - s_[i]) / (s_[i + 1] - s_[i]);
  const Vec2 n = vertex_normal_[i] * (1.0 - t) + vertex_normal_[i + 1] * t;
  return n.normalized();
}

double ReferenceLine::heading_at(double s) const {
  const Vec2 n = normal_at(s);
  // Tangent is the normal rotated -90 degrees.
  return std::atan2(-n.x, n.y);
}

double ReferenceLine::curvature_at(double s) const {
  const size_t i = segment_index(s);
  const double t = (s - s_[i]) / (s_[i + 1] - s_[i]);
  return lerp(curvature_[i], curvature_[i + 1], t);
}

double ReferenceLine::curvature_rate_at(double s) const {
  const size_t i = segment_index(s);
  const double ds = s_[i + 1] - s_[i];
  return (curvature_[i + 1] - curvature_[i]) / ds;
}

FrenetPose ReferenceLine::to_frenet(const Vec2& position) const {
  const size_t n = points_.size();
  Candidate best, second;

  auto consider = [&](const Candidate& c) {
    if (c.foot_distance < best.foot_distance) {
      // Collapse duplicates from shared segment endpoints.
      if (std::abs(c.s - best.s) > 1e-9) second = best;
      best = c;
    } else if (c.foot_distance < second.foot_distance &&
               std::abs(c.s - best.s) > 1e-9) {
      second = c;
    }
  };

  for (size_t i = 0; i + 1 < n; ++i) {
    const Vec2 d = points_[i + 1] - points_[i];
    const Vec2 m = vertex_normal_[i + 1] - vertex_normal_[i];
    const Vec2 u = position - points_[i];
    // Roots of cross(u - t*d, n_i + t*m) = 0: stations where the query point
    // lies along the interpolated normal.
    const double qa = -d.cross(m);
    const double qb = u.cross(m) - d.cross(vertex_normal_[i]);
    const double qc = u.cross(vertex_normal_[i]);

    double roots[2];
    int root_count = 0;
    if (std::abs(qa) < 1e-14) {
      if (std::abs(qb) > 1e-14) roots[root_count++] = -qc / qb;
    } else {
      const double disc = qb * qb - 4.0 * qa * qc;
      if (disc >= 0.0) {
        const double sq = std::sqrt(disc);
        roots[root_count++] = (-qb + sq) / (2.0 * qa);
        roots[root_count++] = (-qb - sq) / (2.0 * qa);
      }
    }
    for (int r = 0; r < root_count; ++r) {
      const double t = roots[r];
      if (t < -1e-12 || t > 1.0 + 1e-12) continue;
      const double tc = clamp(t, 0.0, 1.0);
      const Vec2 foot = points_[i] + d * tc;
      const Vec2 nhat =
          (vertex_normal_[i] * (1.0 - tc) + vertex_normal_[i + 1] * tc)
              .normalized();
      const Vec2 off = position - foot;
      Candidate c;
      c.foot_distance = off.norm();
      c.s = s_[i] + tc * (s_[i + 1] - s_[i]);
      c.l = off.dot(nhat);
      consider(c);
    }
  }

  // Endpoint clamps for points projecting before the start / past the end.
  {
    const Vec2 off0 = position - points_.front();
    const Vec2 tan0 = (points_[1] - points_[0]).normalized();
    if (off0.dot(tan0) < 0.0 || !std::isfinite(best.foot_distance)) {
      Candidate c;
      c.foot_distance = off0.norm();
      c.s = 0.0;
      c.l = off0.dot(vertex_normal_.front());
      consider(c);
    }
    const Vec2 offn = position - points_.back();
    const Vec2 tann = (points_[n - 1] - points_[n - 2]).normalized();
    if (offn.dot(tann) > 0.0 || !std::isfinite(best.foot_distance)) {
      Candidate c;
      c.foot_distance = offn.norm();
      c.s = total_length();
      c.l = offn.dot(vertex_normal_.back());
      consider(c);
    }
  }

  if (std::isfinite(second.foot_distance) &&
      second.foot_distance - best.foot_distance <= 1e-9 &&
      std::abs(second.s - best.s) > 1.0) {
    throw AmbiguousProjection(
        "projection ties at stations " + std::to_string(best.s) + " and " +
        std::to_string(second.s));
  }

  FrenetPose pose;
  pose.s = best.s;
  pose.l = best.l;
  return pose;
}

Vec2 ReferenceLine::from_frenet(const FrenetPose& pose, double* heading_out) const {
  if (pose.s < -kStationSlack || pose.s > total_length() + kStationSlack) {
    throw StationOutOfRange("station " + std::to_string(pose.s) +
                            " outside [0, " + std::to_string(total_length()) +
                            "]");
  }
  const double s = clamp(pose.s, 0.0, total_length());
  const Vec2 p = point_at(s) + normal_at(s) * pose.l;
  if (heading_out != nullptr) {
    *heading_out = normalize_angle(heading_at(s) + std::atan(pose.dl_ds));
  }
  return p;
}

FrenetPose ReferenceLine::to_frenet_state(const CartesianState& state) const {
  FrenetPose pose = to_frenet(state.position);
  const double kr = curvature_at(pose.s);
  const double kr_rate = curvature_rate_at(pose.s);
  const double dtheta = angle_diff(state.heading, heading_at(pose.s));
  const double one_minus_kl = 1.0 - kr * pose.l;
  const double tan_dtheta = std::tan(dtheta);
  const double cos_dtheta = std::cos(dtheta);
  pose.dl_ds = one_minus_kl * tan_dtheta;
  pose.ddl_ds2 =
      -(kr_rate * pose.l + kr * pose.dl_ds) * tan_dtheta +
      one_minus_kl / (cos_dtheta * cos_dtheta) *
          (state.curvature * one_minus_kl / cos_dtheta - kr);
  return pose;
}

CartesianState ReferenceLine::from_frenet_state(const FrenetPose& pose) const {
  CartesianState state;
  state.position = from_frenet(FrenetPose{pose.s, pose.l, 0.0, 0.0});
  const double kr = curvature_at(pose.s);
  const double kr_rate = curvature_rate_at(pose.s);
  const double one_minus_kl = 1.0 - kr * pose.l;
  const double dtheta = std::atan2(pose.dl_ds, one_minus_kl);
  state.heading = normalize_angle(heading_at(pose.s) + dtheta);
  const double cos_dtheta = std::cos(dtheta);
  const double tan_dtheta = pose.dl_ds / one_minus_kl;
  state.curvature =
      ((pose.ddl_ds2 + (kr_rate * pose.l + kr * pose.dl_ds) * tan_dtheta) *
           cos_dtheta * cos_dtheta / one_minus_kl +
       kr) *
      cos_dtheta / one_minus_kl;
  return state;
}

}  // namespace corridor
