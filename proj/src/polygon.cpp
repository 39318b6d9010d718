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

#include "corridor/polygon.hpp"

#include <algorithm>
#include <limits>

namespace corridor {

double polygon_signed_area(const Polygon& poly) {
  double acc = 0.0;
  const size_t n = poly.size();
  for (size_t i = 0; i < n; ++i) {
    const Vec2& p = poly[i];
    const Vec2& q = poly[(i + 1) % n];
    acc += p.cross(q);
  }
  return 0.5 * acc;
}

bool polygon_is_convex_ccw(const Polygon& poly) {
  const size_t n = poly.size();
  if (n < 3) return false;
  if (polygon_signed_area(poly) <= 0.0) return false;
  for (size_t i = 0; i < n; ++i) {
    const Vec2 e1 = poly[(i + 1) % n] - poly[i];
    const Vec2 e2 = poly[(i + 2) % n] - poly[(i + 1) % n];
    if (e1.cross(e2) < -1e-12) return false;
  }
  return true;
}

Polygon transform_polygon(const Polygon& body, const Pose2d& pose) {
  Polygon out;
  out.reserve(body.size());
  for (const Vec2& v : body) out.push_back(pose.to_world(v));
  return out;
}

Polygon rectangle_polygon(double length, double width) {
  const double hl = 0.5 * length;
  const double hw = 0.5 * width;
  return {{hl, -hw}, {hl, hw}, {-hl, hw}, {-hl, -hw}};
}

bool point_in_convex_polygon(const Vec2& p, const Polygon& poly) {
  const size_t n = poly.size();
  for (size_t i = 0; i < n; ++i) {
    const Vec2 e = poly[(i + 1) % n] - poly[i];
    if (e.cross(p - poly[i]) < 0.0) return false;
  }
  return true;
}

double point_segment_distance(const Vec2& p, const Vec2& a, const Vec2& b,
                              Vec2* closest) {
  const Vec2 ab = b - a;
  const double len2 = ab.squared_norm();
  double t = len2 > 0.0 ? clamp((p - a).dot(ab) / len2, 0.0, 1.0) : 0.0;
  const Vec2 c = a + ab * t;
  if (closest != nullptr) *closest = c;
  return (p - c).norm();
}

namespace {

// Projects a polygon onto a unit axis; returns [min, max].
std::pair<double, double> project(const Polygon& poly, const Vec2& axis) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (const Vec2& v : poly) {
    const double d = v.dot(axis);
    lo = std::min(lo, d);
    hi = std::max(hi, d);
  }
  return {lo, hi};
}

bool separated_on_edges(const Polygon& a, const Polygon& b) {
  const size_t n = a.size();
  for (size_t i = 0; i < n; ++i) {
    const Vec2 e = a[(i + 1) % n] - a[i];
    const Vec2 axis = e.left_normal();
    const auto [alo, ahi] = project(a, axis);
    const auto [blo, bhi] = project(b, axis);
    if (ahi < blo || bhi < alo) return true;
  }
  return false;
}

}  // namespace

bool convex_polygons_overlap(const Polygon& a, const Polygon& b) {
  return !separated_on_edges(a, b) && !separated_on_edges(b, a);
}

double convex_polygon_distance(const Polygon& a, const Polygon& b,
                               Vec2* closest_a, Vec2* closest_b) {
  if (convex_polygons_overlap(a, b)) {
    if (closest_a != nullptr || closest_b != nullptr) {
      // Overlapping: report centroids so callers still get a direction.
      Vec2 ca{0, 0}, cb{0, 0};
      for (const Vec2& v : a) ca += v;
      for (const Vec2& v : b) cb += v;
      ca = ca / static_cast<double>(a.size());
      cb = cb / static_cast<double>(b.size());
      if (closest_a != nullptr) *closest_a = ca;
      if (closest_b != nullptr) *closest_b = cb;
    }
    return 0.0;
  }
  double best = std::numeric_limits<double>::infinity();
  Vec2 best_a, best_b;
  const size_t na = a.size();
  const size_t nb = b.size();
  for (size_t i = 0; i < na; ++i) {
    const Vec2& a0 = a[i];
    const Vec2& a1 = a[(i + 1) % na];
    for (size_t j = 0; j < nb; ++j) {
      const Vec2& b0 = b[j];
      const Vec2& b1 = b[(j + 1) % nb];
      Vec2 c;
      double d = point_segment_distance(b0, a0, a1, &c);
      if (d < best) {
        best = d;
        best_a = c;
        best_b = b0;
      }
      d = point_segment_distance(a0, b0, b1, &c);
      if (d < best) {
        best = d;
        best_a = a0;
        best_b = c;
      }
    }
  }
  if (closest_a != nullptr) *closest_a = best_a;
  if (closest_b != nullptr) *closest_b = best_b;
  return best;
}

double point_polygon_distance(const Vec2& p, const Polygon& poly) {
  if (point_in_convex_polygon(p, poly)) return 0.0;
  double best = std::numeric_limits<double>::infinity();
  const size_t n = poly.size();
  for (size_t i = 0; i < n; ++i) {
    best = std::min(best, point_segment_distance(p, poly[i], poly[(i + 1) % n]));
  }
  return best;
}

}  // namespace corridor
