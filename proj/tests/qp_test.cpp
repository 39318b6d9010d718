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

#include "corridor/qp.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "test_util.hpp"

namespace corridor {
namespace {

using testing::BoxQP;
using testing::box_qp_objective;
using testing::direct_objective;
using testing::projected_gradient_solve;

GridSpec plain_grid(int n, double delta) {
  return GridSpec::from_initial_state(n, delta, 0.0, 0.0, 0.0);
}

ReferenceProfileSet single_order0_profile(const std::vector<double>& ref,
                                          double weight) {
  ReferenceProfileSet refs;
  ReferenceProfile p;
  p.ref[0] = ref;
  p.weight[0].assign(ref.size(), weight);
  refs.profiles.push_back(std::move(p));
  return refs;
}

TEST(BuildObjective, Order0IdentityCompletion) {
  const std::vector<double> r = {1.0, -2.0, 0.5, 3.0};
  const QPProblem p = build_objective(single_order0_profile(r, 1.0), plain_grid(4, 1.0));
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      EXPECT_DOUBLE_EQ(p.hessian.at(i, j), i == j ? 2.0 : 0.0);
    }
    EXPECT_DOUBLE_EQ(p.linear[i], -2.0 * r[i]);
  }
  const QPSolution sol = solve_qp(p);
  ASSERT_EQ(sol.status, QPStatus::kOptimal);
  for (int i = 0; i < 4; ++i) EXPECT_NEAR(sol.y[i], r[i], 1e-8);
}

TEST(BuildObjective, TwoProfilesAverage) {
  const std::vector<double> r = {1.0, 2.0, 3.0, 4.0};
  const std::vector<double> q = {3.0, 0.0, -1.0, 2.0};
  ReferenceProfileSet refs = single_order0_profile(r, 1.0);
  ReferenceProfile second;
  second.ref[0] = q;
  second.weight[0].assign(4, 1.0);
  refs.profiles.push_back(std::move(second));
  const QPProblem p = build_objective(refs, plain_grid(4, 1.0));
  const QPSolution sol = solve_qp(p);
  ASSERT_EQ(sol.status, QPStatus::kOptimal);
  for (int i = 0; i < 4; ++i) {
    EXPECT_NEAR(sol.y[i], 0.5 * (r[i] + q[i]), 1e-8);
  }
}

// Random references and weights over all derivative orders: the assembled
// quadratic must reproduce the direct objective, and the analytic gradient
// must match central finite differences.
TEST(BuildObjective, RandomFidelityAllOrders) {
  std::mt19937 rng(314);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_real_distribution<double> sym(-2.0, 2.0);
  const int n = 8;
  const double delta = 0.7;
  const double p0 = 0.3, v0 = -0.2, a0 = 0.1;

  for (int trial = 0; trial < 10; ++trial) {
    ReferenceProfileSet refs;
    const int n_profiles = 1 + trial % 3;
    for (int k = 0; k < n_profiles; ++k) {
      ReferenceProfile p;
      for (int j = 0; j <= 3; ++j) {
        p.ref[j].resize(n);
        p.weight[j].resize(n);
        for (int i = 0; i < n; ++i) {
          p.ref[j][i] = sym(rng);
          p.weight[j][i] = unit(rng);
        }
      }
      refs.profiles.push_back(std::move(p));
    }
    const GridSpec grid = GridSpec::from_initial_state(n, delta, p0, v0, a0);
    const QPProblem prob = build_objective(refs, grid);
    EXPECT_TRUE(is_positive_semidefinite(prob.hessian));

    std::vector<double> y(n), hy(n);
    for (int rep = 0; rep < 100; ++rep) {
      for (int i = 0; i < n; ++i) y[i] = sym(rng);
      const double direct = direct_objective(refs, y, delta, p0, v0, a0);
      prob.hessian.multiply(y, &hy);
      double assembled = prob.constant;
      for (int i = 0; i < n; ++i) {
        assembled += 0.5 * y[i] * hy[i] + prob.linear[i] * y[i];
      }
      EXPECT_NEAR(assembled, direct, 1e-9 * std::max(1.0, std::abs(direct)));
    }

    // Gradient check at one random point.
    for (int i = 0; i < n; ++i) y[i] = sym(rng);
    prob.hessian.multiply(y, &hy);
    const double h = 1e-6;
    for (int i = 0; i < n; ++i) {
      std::vector<double> yp = y, ym = y;
      yp[i] += h;
      ym[i] -= h;
      const double fd = (direct_objective(refs, yp, delta, p0, v0, a0) -
                         direct_objective(refs, ym, delta, p0, v0, a0)) /
                        (2.0 * h);
      const double analytic = hy[i] + prob.linear[i];
      EXPECT_NEAR(analytic, fd, 1e-6 * std::max(1.0, std::abs(fd)));
    }
  }
}

TEST(BuildObjective, ShapeMismatchRejected) {
  ReferenceProfileSet refs;
  ReferenceProfile p;
  p.ref[0] = {1.0, 2.0};  // wrong length for n = 4
  p.weight[0] = {1.0, 1.0};
  refs.profiles.push_back(std::move(p));
  EXPECT_THROW(build_objective(refs, plain_grid(4, 1.0)), ShapeMismatch);
}

TEST(PathConstraints, CenteredCircleBounds) {
  // Near-zero length puts both circle centers on the reference point and the
  // radius collapses to width/2 = 0.6.
  VehicleParams vehicle;
  vehicle.length = 4e-7;
  vehicle.wheelbase = 2e-7;
  vehicle.width = 1.2;
  Tunnel tunnel;
  tunnel.l_lower.assign(6, -2.0);
  tunnel.l_upper.assign(6, 2.0);
  const GridSpec grid = plain_grid(6, 2.0);
  const auto rows = build_path_constraints(tunnel, vehicle, FrenetPose{}, grid, 0.5);
  int circle_rows = 0;
  for (const LinearRow& row : rows) {
    if (row.coeffs.size() <= 2 && row.ub < kInf && row.lb > -kInf &&
        std::abs(row.ub - (2.0 - 0.6)) < 1e-6 && row.ub - row.lb > 1e-6) {
      ++circle_rows;
      EXPECT_NEAR(row.lb, -1.4, 1e-6);
      EXPECT_NEAR(row.ub, 1.4, 1e-6);
    }
  }
  EXPECT_EQ(circle_rows, 12);  // two circles per station
}

TEST(PathConstraints, NarrowTunnelInfeasible) {
  VehicleParams vehicle;
  vehicle.length = 4e-7;
  vehicle.wheelbase = 2e-7;
  vehicle.width = 1.2;  // circle radius 0.6
  Tunnel tunnel;
  tunnel.l_lower.assign(6, -0.55);
  tunnel.l_upper.assign(6, 0.55);  // width 1.1 < 2 * 0.6
  EXPECT_THROW(build_path_constraints(tunnel, vehicle, FrenetPose{},
                                      plain_grid(6, 2.0), 0.5),
               InfeasibleBounds);
}

TEST(SpeedConstraints, MaxAccelRampIsFeasible) {
  VehicleParams vehicle;
  const int n = 20;
  const double dt = 0.2;
  StConstraintSet st;
  st.s_lower.assign(n, 0.0);
  st.s_upper.assign(n, 1e3);
  std::vector<double> caps(n, vehicle.max_speed);
  const GridSpec grid = GridSpec::from_initial_state(n, dt, 0.0, 0.0, 0.0);
  const auto rows =
      build_speed_constraints(st, vehicle, SpeedStart{0.0, 0.0, 0.0}, caps, grid);

  // Discrete ramp at half the acceleration limit (clearly within bounds).
  std::vector<double> y(n);
  double v = 0.0, s = 0.0;
  const double a = 0.5 * vehicle.max_accel;
  for (int j = 0; j < n; ++j) {
    v = std::min(v + a * dt, vehicle.max_speed);
    s += v * dt;
    y[j] = s;
  }
  for (const LinearRow& row : rows) {
    if (row.is_equality()) continue;  // the start pin is checked separately
    const double value = row.dot(y);
    EXPECT_GE(value, row.lb - 1e-9);
    EXPECT_LE(value, row.ub + 1e-9);
  }
}

TEST(SpeedConstraints, StoppingDistancePrecheck) {
  VehicleParams vehicle;
  vehicle.max_decel = 0.5;  // cannot shed 5 m/s inside the horizon
  const int n = 20;
  StConstraintSet st;
  st.s_lower.assign(n, 0.0);
  st.s_upper.assign(n, 0.0);  // full stop demand at the current station
  std::vector<double> caps(n, vehicle.max_speed);
  const GridSpec grid = GridSpec::from_initial_state(n, 0.2, 0.0, 5.0, 0.0);
  EXPECT_THROW(build_speed_constraints(st, vehicle, SpeedStart{0.0, 5.0, 0.0},
                                       caps, grid),
               InfeasibleBounds);
}

TEST(SpeedConstraints, CurvatureCapAppearsInRows) {
  VehicleParams vehicle;
  const int n = 8;
  StConstraintSet st;
  st.s_lower.assign(n, 0.0);
  st.s_upper.assign(n, 1e3);
  // Cap from curvature 0.5 1/m at a_lat_max = 1 m/s^2: sqrt(1/0.5) = sqrt(2).
  std::vector<double> caps(n, std::sqrt(2.0));
  const GridSpec grid = GridSpec::from_initial_state(n, 0.2, 0.0, 0.0, 0.0);
  const auto rows =
      build_speed_constraints(st, vehicle, SpeedStart{0.0, 0.0, 0.0}, caps, grid);
  int velocity_rows = 0;
  for (const LinearRow& row : rows) {
    if (row.coeffs.size() == 2 && std::abs(row.coeffs[1] - 5.0) < 1e-12 &&
        std::abs(row.lb) < 1e-12) {
      ++velocity_rows;
      EXPECT_NEAR(row.ub, std::sqrt(2.0), 1e-12);
    }
  }
  EXPECT_EQ(velocity_rows, n - 1);
}

TEST(SolveQp, OneDimensionalClamp) {
  // minimize (y - 5)^2 subject to y <= 3.
  QPProblem p;
  p.n = 4;
  p.hessian = BandMatrix(4, 0);
  for (int i = 0; i < 4; ++i) p.hessian.add(i, i, 2.0);
  p.linear = {-10.0, 0.0, 0.0, 0.0};
  LinearRow row;
  row.lo = 0;
  row.coeffs = {1.0};
  row.ub = 3.0;
  p.rows.push_back(row);
  SolverOptions opts;
  opts.tol_prim = 1e-8;
  opts.tol_dual = 1e-8;
  opts.max_iter = 20000;
  const QPSolution sol = solve_qp(p, opts);
  ASSERT_EQ(sol.status, QPStatus::kOptimal);
  EXPECT_NEAR(sol.y[0], 3.0, 1e-6);
  EXPECT_NEAR(sol.y[1], 0.0, 1e-6);
}

TEST(SolveQp, DetectsPrimalInfeasibility) {
  QPProblem p;
  p.n = 2;
  p.hessian = BandMatrix(2, 0);
  p.hessian.add(0, 0, 2.0);
  p.hessian.add(1, 1, 2.0);
  p.linear = {0.0, 0.0};
  LinearRow below;
  below.lo = 0;
  below.coeffs = {1.0};
  below.ub = 3.0;
  LinearRow above;
  above.lo = 0;
  above.coeffs = {1.0};
  above.lb = 5.0;
  p.rows = {below, above};
  const QPSolution sol = solve_qp(p);
  EXPECT_EQ(sol.status, QPStatus::kInfeasible);
}

BoxQP random_box_qp(std::mt19937& rng, int n) {
  std::uniform_real_distribution<double> sym(-2.0, 2.0);
  std::uniform_real_distribution<double> unit(0.1, 1.5);
  BoxQP p;
  p.n = n;
  // Banded PSD Hessian via B^T B + eps I with banded random B.
  std::vector<std::vector<double>> b(n, std::vector<double>(n, 0.0));
  for (int i = 0; i < n; ++i) {
    for (int j = std::max(0, i - 2); j <= i; ++j) b[i][j] = sym(rng);
  }
  p.h.assign(n, std::vector<double>(n, 0.0));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      for (int k = 0; k < n; ++k) p.h[i][j] += b[k][i] * b[k][j];
    }
    p.h[i][i] += 0.1;
  }
  p.g.resize(n);
  p.lb.resize(n);
  p.ub.resize(n);
  for (int i = 0; i < n; ++i) {
    p.g[i] = sym(rng);
    const double center = sym(rng);
    const double half = unit(rng);
    p.lb[i] = center - half;
    p.ub[i] = center + half;
  }
  return p;
}

QPProblem to_qp_problem(const BoxQP& p) {
  QPProblem out;
  out.n = p.n;
  out.hessian = BandMatrix(p.n, p.n - 1);
  for (int i = 0; i < p.n; ++i) {
    for (int j = 0; j <= i; ++j) {
      if (p.h[i][j] != 0.0) out.hessian.add(i, j, p.h[i][j]);
    }
  }
  out.linear = p.g;
  for (int i = 0; i < p.n; ++i) {
    LinearRow row;
    row.lo = i;
    row.coeffs = {1.0};
    row.lb = p.lb[i];
    row.ub = p.ub[i];
    out.rows.push_back(row);
  }
  return out;
}

TEST(SolveQp, MatchesProjectedGradientOracle) {
  std::mt19937 rng(99);
  SolverOptions opts;
  opts.tol_prim = 1e-7;
  opts.tol_dual = 1e-7;
  opts.max_iter = 50000;
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 4 + static_cast<int>(rng() % 5);
    const BoxQP box = random_box_qp(rng, n);
    const QPProblem p = to_qp_problem(box);
    const QPSolution sol = solve_qp(p, opts);
    ASSERT_EQ(sol.status, QPStatus::kOptimal) << "trial " << trial;

    const std::vector<double> oracle = projected_gradient_solve(box, 200000);
    const double obj_oracle = box_qp_objective(box, oracle);
    const double obj_admm = box_qp_objective(box, sol.y);
    EXPECT_NEAR(obj_admm, obj_oracle,
                1e-6 * std::max(1.0, std::abs(obj_oracle)))
        << "trial " << trial;

    // Soundness: all constraints within tolerance.
    for (const LinearRow& row : p.rows) {
      const double v = row.dot(sol.y);
      EXPECT_GE(v, row.lb - 1e-4);
      EXPECT_LE(v, row.ub + 1e-4);
    }
    EXPECT_LE(sol.primal_residual, opts.tol_prim);
    EXPECT_LE(sol.dual_residual, opts.tol_dual);
  }
}

TEST(SolveQp, MonotoneRefinement) {
  // A loose solve may sit slightly outside the feasible set (reporting an
  // objective below the true optimum); refining the tolerance must not move
  // the objective by more than the tolerance's order.
  std::mt19937 rng(1234);
  const BoxQP box = random_box_qp(rng, 6);
  const QPProblem p = to_qp_problem(box);
  SolverOptions loose;
  loose.tol_prim = loose.tol_dual = 1e-3;
  SolverOptions tight;
  tight.tol_prim = tight.tol_dual = 1e-7;
  tight.max_iter = 50000;
  const QPSolution a = solve_qp(p, loose);
  const QPSolution b = solve_qp(p, tight);
  ASSERT_EQ(a.status, QPStatus::kOptimal);
  ASSERT_EQ(b.status, QPStatus::kOptimal);
  const double slack = 10.0 * loose.tol_prim * std::max(1.0, std::abs(b.objective_value));
  EXPECT_LE(b.objective_value, a.objective_value + slack);
}

TEST(SolveQp, WeightScalingLeavesArgminUnchanged) {
  std::mt19937 rng(555);
  const BoxQP box = random_box_qp(rng, 6);
  QPProblem p = to_qp_problem(box);
  QPProblem scaled = p;
  const double lambda = 3.7;
  scaled.hessian = BandMatrix(p.n, p.n - 1);
  for (int i = 0; i < p.n; ++i) {
    for (int j = 0; j <= i; ++j) {
      const double v = p.hessian.at(i, j);
      if (v != 0.0) scaled.hessian.add(i, j, lambda * v);
    }
    scaled.linear[i] = lambda * p.linear[i];
  }
  SolverOptions opts;
  opts.tol_prim = opts.tol_dual = 1e-9;
  opts.max_iter = 100000;
  const QPSolution a = solve_qp(p, opts);
  const QPSolution b = solve_qp(scaled, opts);
  ASSERT_EQ(a.status, QPStatus::kOptimal);
  ASSERT_EQ(b.status, QPStatus::kOptimal);
  for (int i = 0; i < p.n; ++i) {
    EXPECT_NEAR(a.y[i], b.y[i], 1e-7);
  }
}

TEST(SolveQp, WarmStartConvergesFaster) {
  std::mt19937 rng(77);
  const BoxQP box = random_box_qp(rng, 8);
  const QPProblem p = to_qp_problem(box);
  const QPSolution cold = solve_qp(p);
  ASSERT_EQ(cold.status, QPStatus::kOptimal);
  WarmStart warm;
  warm.y = cold.y;
  warm.dual = cold.dual;
  const QPSolution hot = solve_qp(p, {}, &warm);
  ASSERT_EQ(hot.status, QPStatus::kOptimal);
  EXPECT_LE(hot.iterations, cold.iterations);
}

// The two-circle covering validated against the exact rectangle footprint.
// Tunnels are shaped like production output: piecewise-constant obstacle
// edges pulled in by the lateral margin. The rectangle, swept densely along
// the interpolated path, must clear the raw obstacle edges.
TEST(TwoCircleCovering, RectangleStaysInsideTunnel) {
  std::mt19937 rng(2024);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  VehicleParams vehicle;  // length 2.0, width 1.0 -> r_c = hypot(0.5, 0.5)
  const double margin = 0.2;  // production lateral margin
  const int n = 20;
  const double delta = 2.0;

  for (int trial = 0; trial < 20; ++trial) {
    // Raw obstacle edges: the road plus 2-3 block intrusions spanning a few
    // stations each (this is what bypass decisions produce).
    std::vector<double> edge_lo(n, -2.0), edge_hi(n, 2.0);
    const int intrusions = 2 + static_cast<int>(rng() % 2);
    for (int b = 0; b < intrusions; ++b) {
      const int start = 2 + static_cast<int>(rng() % (n - 8));
      const int len = 3 + static_cast<int>(rng() % 4);
      const double depth = 0.3 + 0.5 * unit(rng);
      const bool from_top = rng() % 2 == 0;
      for (int i = start; i < std::min(start + len, n); ++i) {
        if (from_top) {
          edge_hi[i] = std::min(edge_hi[i], 2.0 - depth);
        } else {
          edge_lo[i] = std::max(edge_lo[i], -2.0 + depth);
        }
      }
    }
    Tunnel tunnel;
    tunnel.l_lower.resize(n);
    tunnel.l_upper.resize(n);
    for (int i = 0; i < n; ++i) {
      tunnel.l_lower[i] = edge_lo[i] + margin;
      tunnel.l_upper[i] = edge_hi[i] - margin;
    }
    const GridSpec grid = GridSpec::from_initial_state(n, delta, 0.0, 0.0, 0.0);

    // Pull toward alternating extremes so the tunnel binds.
    ReferenceProfile pull;
    pull.ref[0].resize(n);
    pull.weight[0].assign(n, 1.0);
    for (int i = 0; i < n; ++i) {
      pull.ref[0][i] = (i / 7) % 2 == 0 ? 3.0 : -3.0;
    }
    ReferenceProfile smooth;
    smooth.ref[2].assign(n, 0.0);
    smooth.weight[2].assign(n, 20.0);
    smooth.ref[3].assign(n, 0.0);
    smooth.weight[3].assign(n, 20.0);
    ReferenceProfileSet refs;
    refs.profiles.push_back(pull);
    refs.profiles.push_back(smooth);

    QPProblem p = build_objective(refs, grid);
    p.rows = build_path_constraints(tunnel, vehicle, FrenetPose{}, grid, 0.5);
    const QPSolution sol = solve_qp(p);
    ASSERT_EQ(sol.status, QPStatus::kOptimal) << "trial " << trial;

    // Exact covering theorem at the stations: with the heading from the
    // backward-difference slope, every rectangle corner obeys the station's
    // own tunnel bound (the linearized circle constraint dominates).
    for (int i = 1; i <= n; ++i) {
      const double l = sol.y[i - 1];
      const double l_prev = i >= 2 ? sol.y[i - 2] : grid.ghost[0];
      const double dl = (l - l_prev) / delta;
      const Polygon rect = transform_polygon(
          rectangle_polygon(vehicle.length, vehicle.width),
          {{i * delta, l}, std::atan(dl)});
      for (const Vec2& corner : rect) {
        EXPECT_GE(corner.y, tunnel.l_lower[i - 1] - 1e-6) << "trial " << trial;
        EXPECT_LE(corner.y, tunnel.l_upper[i - 1] + 1e-6) << "trial " << trial;
      }
    }

    // Dense sweep between stations against the raw obstacle edges
    // (nearest-station walls): the margin absorbs the discretization.
    std::vector<double> knots(n + 1), slopes(n + 1);
    knots[0] = 0.0;
    for (int i = 0; i < n; ++i) knots[i + 1] = sol.y[i];
    slopes[0] = 0.0;
    for (int k = 1; k < n; ++k) {
      slopes[k] = (knots[k + 1] - knots[k - 1]) / (2.0 * delta);
    }
    slopes[n] = (knots[n] - knots[n - 1]) / delta;

    auto eval = [&](double s, double* l, double* dl) {
      const double u = clamp(s / delta, 0.0, static_cast<double>(n) - 1e-12);
      const int k = static_cast<int>(u);
      const double t = u - k;
      const double t2 = t * t, t3 = t2 * t;
      const double y0 = knots[k], y1 = knots[k + 1];
      const double m0 = slopes[k] * delta, m1 = slopes[k + 1] * delta;
      *l = (2 * t3 - 3 * t2 + 1) * y0 + (t3 - 2 * t2 + t) * m0 +
           (-2 * t3 + 3 * t2) * y1 + (t3 - t2) * m1;
      *dl = ((6 * t2 - 6 * t) * y0 + (3 * t2 - 4 * t + 1) * m0 +
             (-6 * t2 + 6 * t) * y1 + (3 * t2 - 2 * t) * m1) /
            delta;
    };
    auto edge_at = [&](double s, bool upper) {
      const int i = static_cast<int>(clamp(std::round(s / delta), 1.0,
                                           static_cast<double>(n))) - 1;
      return upper ? edge_hi[i] : edge_lo[i];
    };

    for (double s = delta; s <= n * delta; s += delta / 10.0) {
      double l = 0.0, dl = 0.0;
      eval(s, &l, &dl);
      const Polygon rect = transform_polygon(
          rectangle_polygon(vehicle.length, vehicle.width),
          {{s, l}, std::atan(dl)});
      for (const Vec2& corner : rect) {
        EXPECT_GE(corner.y, edge_at(corner.x, false) - 1e-6)
            << "trial " << trial << " s=" << s;
        EXPECT_LE(corner.y, edge_at(corner.x, true) + 1e-6)
            << "trial " << trial << " s=" << s;
      }
    }
  }
}

}  // namespace
}  // namespace corridor
