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

namespace corridor {

// A 2-D pose: position plus heading.
struct Pose2d {
  Vec2 position;
  double heading = 0.0;

  Vec2 to_world(const Vec2& body_point) const {
    const double c = std::cos(heading);
    const double s = std::sin(heading);
    return {position.x + c * body_point.x - s * body_point.y,
            position.y + s * body_point.x + c * body_point.y};
  }
};

// Convex polygon, counter-clockwise vertex order.
using Polygon = std::vector<Vec2>;

// Signed area (positive for counter-clockwise winding).
double polygon_signed_area(const Polygon& poly);

// True iff the polygon has >= 3 vertices, positive area and is convex
// (counter-clockwise, allowing collinear-vertex slack of 1e-12).
bool polygon_is_convex_ccw(const Polygon& poly);

Polygon transform_polygon(const Polygon& body, const Pose2d& pose);

// Axis-aligned rectangle of a vehicle body frame, centered on the reference
// point, +x forward. Counter-clockwise.
Polygon rectangle_polygon(double length, double width);

bool point_in_convex_polygon(const Vec2& p, const Polygon& poly);

double point_segment_distance(const Vec2& p, const Vec2& a, const Vec2& b,
                              Vec2* closest = nullptr);

// Exact separating-axis overlap test for two convex polygons. Touching
// boundaries count as overlap.
bool convex_polygons_overlap(const Polygon& a, const Polygon& b);

// Euclidean distance between two convex polygons (0 when overlapping).
// Optionally reports the closest point pair (undefined on overlap beyond
// being inside the intersection region).
double convex_polygon_distance(const Polygon& a, const Polygon& b,
                               Vec2* closest_a = nullptr,
                               Vec2* closest_b = nullptr);

// Distance from a point to a convex polygon boundary-or-interior
// (0 when inside).
double point_polygon_distance(const Vec2& p, const Polygon& poly);

}  // namespace corridor
