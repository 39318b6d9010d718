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

#include <array>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "corridor/bounds.hpp"
#include "corridor/common.hpp"
#include "corridor/scenario.hpp"

namespace corridor {

class ShapeMismatch : public Error {
 public:
  explicit ShapeMismatch(const std::string& msg) : Error("ShapeMismatch", msg) {}
};

class InfeasibleBounds : public Error {
 public:
  explicit InfeasibleBounds(const std::string& msg)
      : Error("InfeasibleBounds", msg) {}
};

constexpr double kInf = std::numeric_limits<double>::infinity();

/// Symmetric banded matrix (lower storage). entry(i, j) is valid for
/// |i - j| <= bandwidth.
class BandMatrix {
 public:
  BandMatrix() = default;
  BandMatrix(int n, int bandwidth);

  int size() const { return n_; }
  int bandwidth() const { return bw_; }

  double at(int i, int j) const;
  void add(int i, int j, double v);  // symmetric add
  void set(int i, int j, double v);

  // y = A * x for the full symmetric matrix.
  void multiply(const std::vector<double>& x, std::vector<double>* y) const;

  // In-place Cholesky (A = L L^T). Returns false when a pivot drops below
  // the tolerance (matrix not positive definite).
  bool cholesky(double pivot_tol = 1e-13);
  // Solves L L^T x = b after cholesky().
  void solve(std::vector<double>* b) const;

 private:
  int n_ = 0;
  int bw_ = 0;
  std::vector<double> d_;  // d_[i * (bw+1) + k] = entry(i, i - k)
};

// True iff the matrix passes the shifted-factorization semidefiniteness
// check (tolerance 1e-9 on the diagonal shift).
bool is_positive_semidefinite(const BandMatrix& m);

/// One reference profile: targets ref[j][i] and weights w[j][i] for the j-th
/// derivative at grid i (0-based storage for grids 1..N). Unused orders may
/// be left empty (treated as weight 0).
struct ReferenceProfile {
  std::array<std::vector<double>, 4> ref;
  std::array<std::vector<double>, 4> weight;
};

struct ReferenceProfileSet {
  std::vector<ReferenceProfile> profiles;
};

/// Uniform grid of N decision values y_1..y_N with spacing delta. Grid i
/// lives at offset i*delta from the current state; indices 0, -1, -2 are
/// ghost constants from the backward Taylor extension of the initial state
/// (p0, v0, a0):
///   ghost[0] = p0,
///   ghost[1] = p0 - delta*v0 + 0.5*delta^2*a0,
///   ghost[2] = p0 - 2*delta*v0 + 2*delta^2*a0,
/// so that with the pinned first value y_1 = p0 + delta*v0 + 0.5*delta^2*a0
/// the backward differences give y''_1 = a0, y'''_1 = 0, and y'_1 equals the
/// step-average velocity v0 + 0.5*delta*a0.
struct GridSpec {
  int n = 0;
  double delta = 0.0;
  std::array<double, 3> ghost = {0.0, 0.0, 0.0};
  double pinned_first = 0.0;

  static GridSpec from_initial_state(int n, double delta, double p0, double v0,
                                     double a0);
};

/// Sparse constraint row over a consecutive span of grid variables:
/// lb <= sum_k coeffs[k] * y_{lo+k} <= ub (0-based variable indices).
struct LinearRow {
  int lo = 0;
  std::vector<double> coeffs;
  double lb = -kInf;
  double ub = kInf;

  double dot(const std::vector<double>& y) const {
    double acc = 0.0;
    for (size_t k = 0; k < coeffs.size(); ++k) acc += coeffs[k] * y[lo + k];
    return acc;
  }
  bool is_equality() const { return ub - lb <= 1e-12; }
};

struct QPProblem {
  int n = 0;
  BandMatrix hessian;          // H, symmetric positive semidefinite
  std::vector<double> linear;  // g
  double constant = 0.0;       // so J(y) = 0.5 y'Hy + g'y + constant
  std::vector<LinearRow> rows;
};

enum class QPStatus { kOptimal, kMaxIter, kInfeasible };

struct QPSolution {
  std::vector<double> y;
  std::vector<double> dual;
  QPStatus status = QPStatus::kMaxIter;
  double primal_residual = kInf;
  double dual_residual = kInf;
  double objective_value = 0.0;
  int iterations = 0;
  double solve_time = 0.0;  // s
};

struct SolverOptions {
  double tol_prim = 1e-4;
  double tol_dual = 1e-4;
  int max_iter = 4000;
  double rho = 1.0;
  double sigma = 1e-6;
  double alpha = 1.6;
  bool adaptive_rho = true;
};

struct WarmStart {
  std::vector<double> y;
  std::vector<double> dual;  // optional; may be empty
};

/// Assembles the weighted multi-reference objective
///   J = sum_k sum_i sum_{j=0..3} w_{k,i,j} * (y_i^(j) - ref_{k,i,j})^2
/// over backward-difference derivatives on the grid, returning H, g and the
/// constant so that J(y) = 0.5 y'Hy + g'y + constant exactly.
QPProblem build_objective(const ReferenceProfileSet& refs, const GridSpec& grid);

/// Two-circle tunnel constraints plus slope/curvature magnitude rows and the
/// initial-state pin for the path problem (variables l_i over stations).
std::vector<LinearRow> build_path_constraints(const Tunnel& tunnel,
                                              const VehicleParams& vehicle,
                                              const FrenetPose& start,
                                              const GridSpec& grid,
                                              double theta_max);

struct SpeedStart {
  double s = 0.0;
  double v = 0.0;
  double a = 0.0;
};

/// s-t region bounds, speed/acceleration/jerk magnitude rows and the
/// initial-state pin for the speed problem (variables s_j over times).
/// speed_caps[i] is the per-grid speed limit (already combining max_speed
/// and the curvature cap sqrt(a_lat_max / |kappa|)).
std::vector<LinearRow> build_speed_constraints(const StConstraintSet& st,
                                               const VehicleParams& vehicle,
                                               const SpeedStart& start,
                                               const std::vector<double>& speed_caps,
                                               const GridSpec& grid);

/// Operator-splitting (ADMM) solver for convex QPs with two-sided linear
/// constraints. Deterministic for fixed inputs; warm-startable.
QPSolution solve_qp(const QPProblem& problem, const SolverOptions& options = {},
                    const WarmStart* warm = nullptr);

}  // namespace corridor
