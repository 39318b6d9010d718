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

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "corridor/polygon.hpp"

namespace corridor {
namespace {

std::vector<Vec2> circle_arc(double radius, double degrees, double step_deg) {
  std::vector<Vec2> pts;
  for (double d = 0.0; d <= degrees + 1e-9; d += step_deg) {
    const double a = d * M_PI / 180.0;
    pts.push_back({radius * std::sin(a), radius * (1.0 - std::cos(a))});
  }
  return pts;
}

TEST(ArcLengthParametrize, StraightSegment) {
  const ReferenceLine line = ReferenceLine::from_polyline({{0, 0}, {10, 0}});
  ASSERT_EQ(line.points().size(), 2u);
  EXPECT_DOUBLE_EQ(line.stations()[0], 0.0);
  EXPECT_DOUBLE_EQ(line.stations()[1], 10.0);
  EXPECT_DOUBLE_EQ(line.headings()[0], 0.0);
  EXPECT_DOUBLE_EQ(line.headings()[1], 0.0);
  EXPECT_DOUBLE_EQ(line.curvatures()[0], 0.0);
  EXPECT_DOUBLE_EQ(line.curvatures()[1], 0.0);
}

TEST(ArcLengthParametrize, QuarterCircleCurvature) {
  const ReferenceLine line = ReferenceLine::from_polyline(circle_arc(5.0, 90.0, 1.0));
  for (double k : line.curvatures()) {
    EXPECT_NEAR(k, 0.2, 1e-3);
  }
}

TEST(ArcLengthParametrize, CircleCurvatureMatchesRadius) {
  for (double radius : {2.0, 10.0, 40.0}) {
    const ReferenceLine line =
        ReferenceLine::from_polyline(circle_arc(radius, 60.0, 2.0));
    for (size_t i = 1; i + 1 < line.curvatures().size(); ++i) {
      EXPECT_NEAR(line.curvatures()[i], 1.0 / radius, 1e-3);
    }
  }
}

TEST(ArcLengthParametrize, DegenerateInputs) {
  EXPECT_THROW(ReferenceLine::from_polyline({{0, 0}}), DegeneratePolyline);
  EXPECT_THROW(ReferenceLine::from_polyline({}), DegeneratePolyline);
  EXPECT_THROW(ReferenceLine::from_polyline({{0, 0}, {0, 0}}), DegeneratePolyline);
  // Doubling back.
  EXPECT_THROW(ReferenceLine::from_polyline({{0, 0}, {10, 0}, {0, 0}}),
               DegeneratePolyline);
}

TEST(ToFrenet, PointOnStraightLine) {
  const ReferenceLine line = ReferenceLine::from_polyline({{0, 0}, {10, 0}});
  const FrenetPose p = line.to_frenet({5, 0});
  EXPECT_NEAR(p.s, 5.0, 1e-12);
  EXPECT_NEAR(p.l, 0.0, 1e-12);
}

TEST(ToFrenet, PerpendicularOffset) {
  const ReferenceLine line = ReferenceLine::from_polyline({{0, 0}, {10, 0}});
  const FrenetPose p = line.to_frenet({5, 2});
  EXPECT_NEAR(p.s, 5.0, 1e-12);
  EXPECT_NEAR(p.l, 2.0, 1e-12);
}

TEST(ToFrenet, EndpointClamping) {
  const ReferenceLine line = ReferenceLine::from_polyline({{0, 0}, {10, 0}});
  const FrenetPose before = line.to_frenet({-3, 1});
  EXPECT_DOUBLE_EQ(before.s, 0.0);
  EXPECT_NEAR(before.l, 1.0, 1e-12);
  const FrenetPose after = line.to_frenet({13, -1});
  EXPECT_DOUBLE_EQ(after.s, 10.0);
  EXPECT_NEAR(after.l, -1.0, 1e-12);
}

TEST(ToFrenet, AmbiguousProjectionOnUTurn) {
  // Two parallel legs 4 m apart joined by a half circle; the midpoint between
  // the legs projects equally onto both.
  std::vector<Vec2> pts;
  for (double x = 20.0; x >= 0.0; x -= 1.0) pts.push_back({x, 0.0});
  for (double d = 10.0; d < 180.0; d += 10.0) {
    const double a = d * M_PI / 180.0;
    pts.push_back({-2.0 * std::sin(a), 2.0 - 2.0 * std::cos(a)});
  }
  for (double x = 0.0; x <= 20.0; x += 1.0) pts.push_back({x, 4.0});
  const ReferenceLine line = ReferenceLine::from_polyline(pts);
  EXPECT_THROW(line.to_frenet({10.0, 2.0}), AmbiguousProjection);
}

TEST(FromFrenet, StraightLineTrivials) {
  const ReferenceLine line = ReferenceLine::from_polyline({{0, 0}, {10, 0}});
  double heading = 0.0;
  const Vec2 a = line.from_frenet({5.0, 0.0, 0.0, 0.0}, &heading);
  EXPECT_NEAR(a.x, 5.0, 1e-12);
  EXPECT_NEAR(a.y, 0.0, 1e-12);
  EXPECT_NEAR(heading, 0.0, 1e-12);
  const Vec2 b = line.from_frenet({5.0, 2.0, 0.0, 0.0}, &heading);
  EXPECT_NEAR(b.x, 5.0, 1e-12);
  EXPECT_NEAR(b.y, 2.0, 1e-12);
}

TEST(FromFrenet, StationOutOfRange) {
  const ReferenceLine line = ReferenceLine::from_polyline({{0, 0}, {10, 0}});
  EXPECT_THROW(line.from_frenet({10.5, 0.0, 0.0, 0.0}), StationOutOfRange);
  EXPECT_THROW(line.from_frenet({-0.5, 0.0, 0.0, 0.0}), StationOutOfRange);
}

TEST(RoundTrip, RandomPointsOnCurvedLine) {
  const ReferenceLine line = ReferenceLine::from_polyline(circle_arc(5.0, 90.0, 1.0));
  std::mt19937 rng(42);
  std::uniform_real_distribution<double> s_dist(0.0, line.total_length());
  std::uniform_real_distribution<double> l_dist(-2.0, 2.0);
  for (int i = 0; i < 100; ++i) {
    const double s = s_dist(rng);
    const double l = l_dist(rng);
    const Vec2 p = line.from_frenet({s, l, 0.0, 0.0});
    const FrenetPose back = line.to_frenet(p);
    const Vec2 p2 = line.from_frenet(back);
    EXPECT_NEAR(p.x, p2.x, 1e-6);
    EXPECT_NEAR(p.y, p2.y, 1e-6);
    EXPECT_NEAR(back.s, s, 1e-6);
    EXPECT_NEAR(back.l, l, 1e-6);
  }
}

TEST(RoundTrip, BelowTurningRadiusProperty) {
  // Wavy line; offsets strictly below the minimum turning radius round-trip.
  std::vector<Vec2> pts;
  for (double x = 0.0; x <= 60.0; x += 0.5) {
    pts.push_back({x, 2.0 * std::sin(x / 6.0)});
  }
  const ReferenceLine line = ReferenceLine::from_polyline(pts);
  const double radius = line.min_turning_radius();
  ASSERT_GT(radius, 1.0);
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> s_dist(0.0, line.total_length());
  std::uniform_real_distribution<double> l_dist(-0.9 * radius, 0.9 * radius);
  for (int i = 0; i < 200; ++i) {
    const FrenetPose pose{s_dist(rng), l_dist(rng), 0.0, 0.0};
    const Vec2 p = line.from_frenet(pose);
    const FrenetPose back = line.to_frenet(p);
    const Vec2 p2 = line.from_frenet(back);
    EXPECT_NEAR(p.x, p2.x, 1e-6);
    EXPECT_NEAR(p.y, p2.y, 1e-6);
  }
}

TEST(MonotoneStation, WalkingForwardIncreasesS) {
  const ReferenceLine line = ReferenceLine::from_polyline(circle_arc(8.0, 90.0, 1.0));
  double prev = -1.0;
  for (double s = 0.0; s <= line.total_length(); s += 0.1) {
    const Vec2 p = line.from_frenet({s, 0.5, 0.0, 0.0});
    const double projected = line.to_frenet(p).s;
    EXPECT_GT(projected, prev);
    prev = projected;
  }
}

TEST(FrenetState, HeadingAndCurvatureComposition) {
  const ReferenceLine line = ReferenceLine::from_polyline(circle_arc(10.0, 90.0, 1.0));
  // A state exactly on the centerline moving along it.
  const Vec2 p = line.from_frenet({5.0, 0.0, 0.0, 0.0});
  const double h = line.heading_at(5.0);
  const FrenetPose fp = line.to_frenet_state({p, h, 0.1});
  EXPECT_NEAR(fp.l, 0.0, 1e-9);
  EXPECT_NEAR(fp.dl_ds, 0.0, 1e-9);
  const CartesianState back = line.from_frenet_state(fp);
  EXPECT_NEAR(back.heading, h, 1e-9);
  EXPECT_NEAR(back.curvature, 0.1, 1e-6);
}

TEST(Polygon, DistanceAndOverlap) {
  const Polygon a = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};
  const Polygon b = {{2, 0}, {3, 0}, {3, 1}, {2, 1}};
  EXPECT_FALSE(convex_polygons_overlap(a, b));
  EXPECT_NEAR(convex_polygon_distance(a, b), 1.0, 1e-12);
  const Polygon c = {{0.5, 0.5}, {1.5, 0.5}, {1.5, 1.5}, {0.5, 1.5}};
  EXPECT_TRUE(convex_polygons_overlap(a, c));
  EXPECT_DOUBLE_EQ(convex_polygon_distance(a, c), 0.0);
}

TEST(Polygon, RectangleHelpers) {
  const Polygon rect = rectangle_polygon(2.0, 1.0);
  EXPECT_TRUE(polygon_is_convex_ccw(rect));
  EXPECT_NEAR(polygon_signed_area(rect), 2.0, 1e-12);
  EXPECT_TRUE(point_in_convex_polygon({0.9, 0.4}, rect));
  EXPECT_FALSE(point_in_convex_polygon({1.1, 0.0}, rect));
}

}  // namespace
}  // namespace corridor
