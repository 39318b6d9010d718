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

#include <algorithm>
#include <chrono>
#include <cmath>

namespace corridor {

// ---------------------------------------------------------------------------
// BandMatrix
// ---------------------------------------------------------------------------

BandMatrix::BandMatrix(int n, int bandwidth)
    : n_(n), bw_(std::min(bandwidth, n - 1)), d_(static_cast<size_t>(n) * (bw_ + 1), 0.0) {}

double BandMatrix::at(int i, int j) const {
  if (j > i) std::swap(i, j);
  const int k = i - j;
  if (k > bw_) return 0.0;
  return d_[static_cast<size_t>(i) * (bw_ + 1) + k];
}

void BandMatrix::add(int i, int j, double v) {
  if (j > i) std::swap(i, j);
  d_[static_cast<size_t>(i) * (bw_ + 1) + (i - j)] += v;
}

void BandMatrix::set(int i, int j, double v) {
  if (j > i) std::swap(i, j);
  d_[static_cast<size_t>(i) * (bw_ + 1) + (i - j)] = v;
}

void BandMatrix::multiply(const std::vector<double>& x,
                          std::vector<double>* y) const {
  y->assign(n_, 0.0);
  for (int i = 0; i < n_; ++i) {
    double acc = 0.0;
    const int lo = std::max(0, i - bw_);
    for (int j = lo; j <= i; ++j) {
      acc += d_[static_cast<size_t>(i) * (bw_ + 1) + (i - j)] * x[j];
    }
    const int hi = std::min(n_ - 1, i + bw_);
    for (int j = i + 1; j <= hi; ++j) {
      acc += d_[static_cast<size_t>(j) * (bw_ + 1) + (j - i)] * x[j];
    }
    (*y)[i] = acc;
  }
}

bool BandMatrix::cholesky(double pivot_tol) {
  for (int i = 0; i < n_; ++i) {
    const int lo = std::max(0, i - bw_);
    for (int j = lo; j <= i; ++j) {
      double sum = d_[static_cast<size_t>(i) * (bw_ + 1) + (i - j)];
      const int klo = std::max(lo, std::max(0, j - bw_));
      for (int k = klo; k < j; ++k) {
        sum -= d_[static_cast<size_t>(i) * (bw_ + 1) + (i - k)] *
               d_[static_cast<size_t>(j) * (bw_ + 1) + (j - k)];
      }
      if (j < i) {
        d_[static_cast<size_t>(i) * (bw_ + 1) + (i - j)] =
            sum / d_[static_cast<size_t>(j) * (bw_ + 1)];
      } else {
        if (sum <= pivot_tol) return false;
        d_[static_cast<size_t>(i) * (bw_ + 1)] = std::sqrt(sum);
      }
    }
  }
  return true;
}

void BandMatrix::solve(std::vector<double>* b) const {
  std::vector<double>& x = *b;
  for (int i = 0; i < n_; ++i) {
    double sum = x[i];
    const int lo = std::max(0, i - bw_);
    for (int j = lo; j < i; ++j) {
      sum -= d_[static_cast<size_t>(i) * (bw_ + 1) + (i - j)] * x[j];
    }
    x[i] = sum / d_[static_cast<size_t>(i) * (bw_ + 1)];
  }
  for (int i = n_ - 1; i >= 0; --i) {
    double sum = x[i];
    const int hi = std::min(n_ - 1, i + bw_);
    for (int j = i + 1; j <= hi; ++j) {
      sum -= d_[static_cast<size_t>(j) * (bw_ + 1) + (j - i)] * x[j];
    }
    x[i] = sum / d_[static_cast<size_t>(i) * (bw_ + 1)];
  }
}

bool is_positive_semidefinite(const BandMatrix& m) {
  BandMatrix shifted = m;
  for (int i = 0; i < m.size(); ++i) shifted.add(i, i, 1e-9);
  return shifted.cholesky(0.0);
}

// ---------------------------------------------------------------------------
// Grids and stencils
// ---------------------------------------------------------------------------

GridSpec GridSpec::from_initial_state(int n, double delta, double p0, double v0,
                                      double a0) {
  GridSpec grid;
  grid.n = n;
  grid.delta = delta;
  const double d2 = delta * delta;
  grid.ghost = {p0, p0 - delta * v0 + 0.5 * d2 * a0,
                p0 - 2.0 * delta * v0 + 2.0 * d2 * a0};
  grid.pinned_first = p0 + delta * v0 + 0.5 * d2 * a0;
  return grid;
}

namespace {

// Backward-difference stencil for y_i^(j) with ghost constants folded out:
// expression = sum coeffs[k] * y_{lo+k} + ghost (0-based variables).
struct Stencil {
  int lo = 0;
  std::vector<double> coeffs;
  double ghost = 0.0;
};

constexpr double kBinomial[4][4] = {
    {1, 0, 0, 0}, {1, 1, 0, 0}, {1, 2, 1, 0}, {1, 3, 3, 1}};

Stencil derivative_stencil(const GridSpec& grid, int i, int j) {
  const double scale = std::pow(grid.delta, static_cast<double>(j));
  Stencil st;
  const int lowest_index = std::max(i - j, 1);
  st.lo = lowest_index - 1;
  st.coeffs.assign(static_cast<size_t>(i - lowest_index) + 1, 0.0);
  for (int m = 0; m <= j; ++m) {
    const double c = (m % 2 == 0 ? 1.0 : -1.0) * kBinomial[j][m] / scale;
    const int idx = i - m;
    if (idx >= 1) {
      st.coeffs[idx - lowest_index] = c;
    } else {
      st.ghost += c * grid.ghost[static_cast<size_t>(-idx)];
    }
  }
  return st;
}

LinearRow stencil_row(const GridSpec& grid, int i, int j, double lb, double ub) {
  const Stencil st = derivative_stencil(grid, i, j);
  LinearRow row;
  row.lo = st.lo;
  row.coeffs = st.coeffs;
  row.lb = std::isfinite(lb) ? lb - st.ghost : lb;
  row.ub = std::isfinite(ub) ? ub - st.ghost : ub;
  return row;
}

}  // namespace

// ---------------------------------------------------------------------------
// Objective assembly
// ---------------------------------------------------------------------------

QPProblem build_objective(const ReferenceProfileSet& refs, const GridSpec& grid) {
  if (grid.n < 4) throw ShapeMismatch("grid needs at least 4 points");
  if (!(grid.delta > 0.0)) throw ShapeMismatch("grid spacing must be > 0");

  QPProblem problem;
  problem.n = grid.n;
  problem.hessian = BandMatrix(grid.n, 3);
  problem.linear.assign(grid.n, 0.0);
  problem.constant = 0.0;

  for (size_t k = 0; k < refs.profiles.size(); ++k) {
    const ReferenceProfile& profile = refs.profiles[k];
    for (int j = 0; j <= 3; ++j) {
      const auto& w = profile.weight[j];
      const auto& r = profile.ref[j];
      if (w.empty() && r.empty()) continue;
      if (w.size() != static_cast<size_t>(grid.n) ||
          r.size() != static_cast<size_t>(grid.n)) {
        throw ShapeMismatch("profile " + std::to_string(k) + " order " +
                            std::to_string(j) + " has wrong length");
      }
      for (int i = 1; i <= grid.n; ++i) {
        const double weight = w[i - 1];
        if (weight == 0.0) continue;
        if (weight < 0.0) {
          throw ShapeMismatch("negative weight at profile " + std::to_string(k));
        }
        const Stencil st = derivative_stencil(grid, i, j);
        const double beta = st.ghost - r[i - 1];
        const size_t m = st.coeffs.size();
        for (size_t p = 0; p < m; ++p) {
          for (size_t q = 0; q <= p; ++q) {
            problem.hessian.add(st.lo + static_cast<int>(p),
                                st.lo + static_cast<int>(q),
                                2.0 * weight * st.coeffs[p] * st.coeffs[q]);
          }
          problem.linear[st.lo + p] += 2.0 * weight * beta * st.coeffs[p];
        }
        problem.constant += weight * beta * beta;
      }
    }
  }
  return problem;
}

// ---------------------------------------------------------------------------
// Constraint builders
// ---------------------------------------------------------------------------

std::vector<LinearRow> build_path_constraints(const Tunnel& tunnel,
                                              const VehicleParams& vehicle,
                                              const FrenetPose& start,
                                              const GridSpec& grid,
                                              double theta_max) {
  const int n = grid.n;
  if (tunnel.l_lower.size() != static_cast<size_t>(n) ||
      tunnel.l_upper.size() != static_cast<size_t>(n)) {
    throw ShapeMismatch("tunnel bounds do not match grid size");
  }
  const double quarter = vehicle.length / 4.0;
  const double radius = std::hypot(quarter, vehicle.width / 2.0);
  const double offsets[2] = {-quarter, quarter};

  for (int i = 0; i < n; ++i) {
    if (tunnel.l_lower[i] + radius > tunnel.l_upper[i] - radius + 1e-12) {
      throw InfeasibleBounds("tunnel narrower than two-circle diameter at station " +
                             std::to_string(i + 1));
    }
  }

  std::vector<LinearRow> rows;
  rows.reserve(static_cast<size_t>(4 * n) + 2);
  const double delta = grid.delta;
  const double pinned = grid.pinned_first;

  for (int i = 1; i <= n; ++i) {
    const double lb = tunnel.l_lower[i - 1] + radius;
    const double ub = tunnel.l_upper[i - 1] - radius;
    for (const double c : offsets) {
      LinearRow row;
      if (i >= 2) {
        row.lo = i - 2;
        row.coeffs = {-c / delta, 1.0 + c / delta};
        row.lb = lb;
        row.ub = ub;
      } else {
        const double ghost = (-c / delta) * grid.ghost[0];
        row.lo = 0;
        row.coeffs = {1.0 + c / delta};
        row.lb = lb - ghost;
        row.ub = ub - ghost;
        const double expr = row.coeffs[0] * pinned;
        if (expr < row.lb - 1e-9 || expr > row.ub + 1e-9) {
          throw InfeasibleBounds("start pose violates the tunnel");
        }
      }
      rows.push_back(std::move(row));
    }
  }

  const double slope = std::tan(theta_max);
  for (int i = 2; i <= n; ++i) {
    rows.push_back(stencil_row(grid, i, 1, -slope, slope));
  }
  const double kappa_bound = vehicle.max_curvature;
  for (int i = 2; i <= n; ++i) {
    rows.push_back(stencil_row(grid, i, 2, -kappa_bound, kappa_bound));
  }

  LinearRow pin;
  pin.lo = 0;
  pin.coeffs = {1.0};
  pin.lb = pin.ub = pinned;
  rows.push_back(std::move(pin));
  return rows;
}

std::vector<LinearRow> build_speed_constraints(const StConstraintSet& st,
                                               const VehicleParams& vehicle,
                                               const SpeedStart& start,
                                               const std::vector<double>& speed_caps,
                                               const GridSpec& grid) {
  const int n = grid.n;
  if (st.s_lower.size() != static_cast<size_t>(n) ||
      st.s_upper.size() != static_cast<size_t>(n) ||
      speed_caps.size() != static_cast<size_t>(n)) {
    throw ShapeMismatch("s-t bounds do not match grid size");
  }
  const double delta = grid.delta;
  const double v0 = std::max(start.v, 0.0);
  const double decel = vehicle.max_decel;

  // Feasibility pre-checks: crossed bounds and the closed-form stopping
  // distance v^2 / (2 * max_decel) against every upper bound.
  for (int i = 1; i <= n; ++i) {
    if (st.s_lower[i - 1] > st.s_upper[i - 1] + 1e-12) {
      throw InfeasibleBounds("s-t bounds cross at grid " + std::to_string(i));
    }
    const double t = i * delta;
    const double brake_time = v0 / decel;
    const double min_stop =
        start.s + (t < brake_time ? v0 * t - 0.5 * decel * t * t
                                  : v0 * v0 / (2.0 * decel));
    if (st.s_upper[i - 1] + 1e-9 < min_stop) {
      throw InfeasibleBounds(
          "cannot brake to the s-t upper bound at t=" + std::to_string(t));
    }
  }

  std::vector<LinearRow> rows;
  rows.reserve(static_cast<size_t>(4 * n) + 2);
  const double pinned = grid.pinned_first;
  if (pinned < st.s_lower[0] - 1e-9 || pinned > st.s_upper[0] + 1e-9) {
    throw InfeasibleBounds("initial state violates the s-t bounds");
  }

  for (int i = 2; i <= n; ++i) {
    LinearRow row;
    row.lo = i - 1;
    row.coeffs = {1.0};
    row.lb = st.s_lower[i - 1];
    row.ub = st.s_upper[i - 1];
    rows.push_back(std::move(row));
  }
  for (int i = 2; i <= n; ++i) {
    // The comfort speed cap relaxes toward the start so that an ego entering
    // faster than the cap can brake into it instead of going infeasible.
    const double relax = std::max(0.0, v0 - 0.5 * decel * (i * delta));
    rows.push_back(stencil_row(grid, i, 1, 0.0, std::max(speed_caps[i - 1], relax)));
  }
  for (int i = 2; i <= n; ++i) {
    rows.push_back(stencil_row(grid, i, 2, -vehicle.max_decel, vehicle.max_accel));
  }
  for (int i = 2; i <= n; ++i) {
    rows.push_back(stencil_row(grid, i, 3, -vehicle.max_jerk, vehicle.max_jerk));
  }

  LinearRow pin;
  pin.lo = 0;
  pin.coeffs = {1.0};
  pin.lb = pin.ub = pinned;
  rows.push_back(std::move(pin));
  return rows;
}

// ---------------------------------------------------------------------------
// ADMM solver
// ---------------------------------------------------------------------------

namespace {

struct RowMatrix {
  const std::vector<LinearRow>* rows;

  void multiply(const std::vector<double>& x, std::vector<double>* out) const {
    out->resize(rows->size());
    for (size_t r = 0; r < rows->size(); ++r) (*out)[r] = (*rows)[r].dot(x);
  }

  void multiply_transpose(const std::vector<double>& w, size_t n,
                          std::vector<double>* out) const {
    out->assign(n, 0.0);
    for (size_t r = 0; r < rows->size(); ++r) {
      const LinearRow& row = (*rows)[r];
      for (size_t k = 0; k < row.coeffs.size(); ++k) {
        (*out)[row.lo + k] += row.coeffs[k] * w[r];
      }
    }
  }
};

double inf_norm(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

BandMatrix build_kkt(const QPProblem& p, double sigma,
                     const std::vector<double>& rho) {
  int bw = p.hessian.bandwidth();
  for (const LinearRow& row : p.rows) {
    bw = std::max(bw, static_cast<int>(row.coeffs.size()) - 1);
  }
  BandMatrix m(p.n, bw);
  for (int i = 0; i < p.n; ++i) {
    for (int j = std::max(0, i - p.hessian.bandwidth()); j <= i; ++j) {
      const double v = p.hessian.at(i, j);
      if (v != 0.0) m.add(i, j, v);
    }
    m.add(i, i, sigma);
  }
  for (size_t r = 0; r < p.rows.size(); ++r) {
    const LinearRow& row = p.rows[r];
    for (size_t a = 0; a < row.coeffs.size(); ++a) {
      for (size_t b = 0; b <= a; ++b) {
        m.add(row.lo + static_cast<int>(a), row.lo + static_cast<int>(b),
              rho[r] * row.coeffs[a] * row.coeffs[b]);
      }
    }
  }
  return m;
}

}  // namespace

QPSolution solve_qp(const QPProblem& problem, const SolverOptions& options,
                    const WarmStart* warm) {
  const auto t_start = std::chrono::steady_clock::now();
  const int n = problem.n;
  const size_t m = problem.rows.size();
  QPSolution sol;

  auto finish = [&](QPSolution& s) -> QPSolution& {
    s.solve_time = std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                                 t_start)
                       .count();
    double quad = 0.0;
    std::vector<double> hy;
    problem.hessian.multiply(s.y, &hy);
    for (int i = 0; i < n; ++i) {
      quad += 0.5 * s.y[i] * hy[i] + problem.linear[i] * s.y[i];
    }
    s.objective_value = quad + problem.constant;
    return s;
  };

  if (m == 0) {
    // Unconstrained: direct factorization (regularized only on breakdown).
    sol.y.assign(n, 0.0);
    BandMatrix h = problem.hessian;
    BandMatrix attempt = h;
    std::vector<double> rhs(problem.linear);
    for (double& v : rhs) v = -v;
    if (!attempt.cholesky()) {
      attempt = h;
      for (int i = 0; i < n; ++i) attempt.add(i, i, options.sigma);
      attempt.cholesky();
    }
    attempt.solve(&rhs);
    sol.y = rhs;
    std::vector<double> grad;
    problem.hessian.multiply(sol.y, &grad);
    for (int i = 0; i < n; ++i) grad[i] += problem.linear[i];
    sol.dual_residual = inf_norm(grad);
    sol.primal_residual = 0.0;
    sol.status = sol.dual_residual <= options.tol_dual ? QPStatus::kOptimal
                                                       : QPStatus::kMaxIter;
    return finish(sol);
  }

  const RowMatrix A{&problem.rows};
  double rho_base = options.rho;
  auto make_rho = [&](double base) {
    std::vector<double> rho(m);
    for (size_t r = 0; r < m; ++r) {
      rho[r] = problem.rows[r].is_equality() ? base * 1e3 : base;
    }
    return rho;
  };
  std::vector<double> rho = make_rho(rho_base);
  BandMatrix kkt = build_kkt(problem, options.sigma, rho);
  if (!kkt.cholesky()) {
    // H PSD + sigma I + rho A'A should always factor; bail out defensively.
    sol.status = QPStatus::kMaxIter;
    sol.y.assign(n, 0.0);
    return finish(sol);
  }

  std::vector<double> x(n, 0.0);
  if (warm != nullptr && warm->y.size() == static_cast<size_t>(n)) x = warm->y;
  std::vector<double> z;
  A.multiply(x, &z);
  for (size_t r = 0; r < m; ++r) {
    z[r] = clamp(z[r], problem.rows[r].lb, problem.rows[r].ub);
  }
  std::vector<double> lambda(m, 0.0);
  if (warm != nullptr && warm->dual.size() == m) lambda = warm->dual;

  std::vector<double> rhs(n), xt(n), zt(m), ax(m), atl(n), grad(n), dlam(m);
  const double alpha = options.alpha;
  const double eps_pinf = 1e-5;

  // Direct solve on the estimated active set (one banded factorization with
  // a large penalty on active rows). Returns true and overwrites the iterate
  // when the polished point meets the absolute tolerances.
  auto try_polish = [&](double r_prim_now) {
    if (r_prim_now > 10.0 * options.tol_prim) return false;
    constexpr double kPenalty = 1e8;
    std::vector<double> target(m);
    std::vector<bool> active(m, false);
    for (size_t r = 0; r < m; ++r) {
      const LinearRow& row = problem.rows[r];
      const double tol_act = 1e-6 * (1.0 + std::abs(z[r]));
      if (row.is_equality()) {
        active[r] = true;
        target[r] = row.lb;
      } else if (std::isfinite(row.ub) && z[r] >= row.ub - tol_act) {
        active[r] = true;
        target[r] = row.ub;
      } else if (std::isfinite(row.lb) && z[r] <= row.lb + tol_act) {
        active[r] = true;
        target[r] = row.lb;
      }
    }
    int bw = problem.hessian.bandwidth();
    for (const LinearRow& row : problem.rows) {
      bw = std::max(bw, static_cast<int>(row.coeffs.size()) - 1);
    }
    BandMatrix penalized(n, bw);
    for (int i = 0; i < n; ++i) {
      for (int j = std::max(0, i - problem.hessian.bandwidth()); j <= i; ++j) {
        const double v = problem.hessian.at(i, j);
        if (v != 0.0) penalized.add(i, j, v);
      }
      penalized.add(i, i, 1e-9);
    }
    std::vector<double> rhs_p(n);
    for (int i = 0; i < n; ++i) rhs_p[i] = -problem.linear[i];
    for (size_t r = 0; r < m; ++r) {
      if (!active[r]) continue;
      const LinearRow& row = problem.rows[r];
      for (size_t a = 0; a < row.coeffs.size(); ++a) {
        for (size_t b = 0; b <= a; ++b) {
          penalized.add(row.lo + static_cast<int>(a), row.lo + static_cast<int>(b),
                        kPenalty * row.coeffs[a] * row.coeffs[b]);
        }
        rhs_p[row.lo + a] += kPenalty * target[r] * row.coeffs[a];
      }
    }
    if (!penalized.cholesky()) return false;
    penalized.solve(&rhs_p);
    const std::vector<double>& y_p = rhs_p;

    // Dual estimate from the penalty, zero on inactive rows.
    std::vector<double> lam_p(m, 0.0);
    for (size_t r = 0; r < m; ++r) {
      if (!active[r]) continue;
      lam_p[r] = kPenalty * (problem.rows[r].dot(y_p) - target[r]);
    }
    // Absolute residual check at the polished point.
    double rp = 0.0;
    for (size_t r = 0; r < m; ++r) {
      const double v = problem.rows[r].dot(y_p);
      rp = std::max(rp, std::max(problem.rows[r].lb - v, v - problem.rows[r].ub));
    }
    rp = std::max(rp, 0.0);
    std::vector<double> grad_p;
    problem.hessian.multiply(y_p, &grad_p);
    std::vector<double> atl_p;
    A.multiply_transpose(lam_p, n, &atl_p);
    double rd = 0.0;
    for (int i = 0; i < n; ++i) {
      rd = std::max(rd, std::abs(grad_p[i] + problem.linear[i] + atl_p[i]));
    }
    if (rp <= options.tol_prim && rd <= options.tol_dual) {
      x = y_p;
      lambda = lam_p;
      sol.primal_residual = rp;
      sol.dual_residual = rd;
      return true;
    }
    return false;
  };

  int iter = 0;
  for (iter = 1; iter <= options.max_iter; ++iter) {
    // rhs = sigma x - g + A'(rho z - lambda)
    for (size_t r = 0; r < m; ++r) dlam[r] = rho[r] * z[r] - lambda[r];
    A.multiply_transpose(dlam, n, &atl);
    for (int i = 0; i < n; ++i) {
      rhs[i] = options.sigma * x[i] - problem.linear[i] + atl[i];
    }
    xt = rhs;
    kkt.solve(&xt);
    A.multiply(xt, &zt);

    for (int i = 0; i < n; ++i) x[i] = alpha * xt[i] + (1.0 - alpha) * x[i];
    double max_dlam = 0.0;
    for (size_t r = 0; r < m; ++r) {
      const double zp = alpha * zt[r] + (1.0 - alpha) * z[r];
      const double v = zp + lambda[r] / rho[r];
      const double znew = clamp(v, problem.rows[r].lb, problem.rows[r].ub);
      const double dl = rho[r] * (zp - znew);
      dlam[r] = dl;
      max_dlam = std::max(max_dlam, std::abs(dl));
      lambda[r] += dl;
      z[r] = znew;
    }

    const bool check = (iter % 10 == 0) || iter == options.max_iter;
    if (!check) continue;

    A.multiply(x, &ax);
    double r_prim = 0.0;
    for (size_t r = 0; r < m; ++r) r_prim = std::max(r_prim, std::abs(ax[r] - z[r]));
    problem.hessian.multiply(x, &grad);
    A.multiply_transpose(lambda, n, &atl);
    double r_dual = 0.0;
    for (int i = 0; i < n; ++i) {
      r_dual = std::max(r_dual, std::abs(grad[i] + problem.linear[i] + atl[i]));
    }
    sol.primal_residual = r_prim;
    sol.dual_residual = r_dual;
    const double prim_scale = std::max({inf_norm(ax), inf_norm(z), 1e-6});
    const double dual_scale = std::max(
        {inf_norm(grad), inf_norm(atl), inf_norm(problem.linear), 1e-6});

    if (r_prim <= options.tol_prim && r_dual <= options.tol_dual) {
      sol.status = QPStatus::kOptimal;
      break;
    }
    // Once primal settles, a direct active-set polish usually lands the
    // exact KKT point well before the dual residual converges on its own.
    if (iter % 50 == 0 && try_polish(r_prim)) {
      sol.status = QPStatus::kOptimal;
      break;
    }

    // Primal infeasibility certificate from the dual update direction.
    if (max_dlam > 1e-12) {
      A.multiply_transpose(dlam, n, &atl);
      if (inf_norm(atl) <= eps_pinf * max_dlam) {
        double support = 0.0;
        bool valid = true;
        for (size_t r = 0; r < m; ++r) {
          const double up = std::max(dlam[r], 0.0);
          const double dn = std::min(dlam[r], 0.0);
          if (up > 0.0) {
            if (!std::isfinite(problem.rows[r].ub)) {
              if (up > eps_pinf * max_dlam) {
                valid = false;
                break;
              }
            } else {
              support += problem.rows[r].ub * up;
            }
          }
          if (dn < 0.0) {
            if (!std::isfinite(problem.rows[r].lb)) {
              if (-dn > eps_pinf * max_dlam) {
                valid = false;
                break;
              }
            } else {
              support += problem.rows[r].lb * dn;
            }
          }
        }
        if (valid && support <= -eps_pinf * max_dlam) {
          sol.status = QPStatus::kInfeasible;
          break;
        }
      }
    }

    // Residual-balancing rho adaptation on normalized residuals.
    if (options.adaptive_rho && iter % 50 == 0) {
      const double rp_rel = r_prim / prim_scale;
      const double rd_rel = r_dual / dual_scale;
      if (rd_rel > 1e-16) {
        const double proposed =
            clamp(rho_base * std::sqrt(rp_rel / rd_rel), 1e-6, 1e6);
        if (proposed > 5.0 * rho_base || proposed < rho_base / 5.0) {
          rho_base = proposed;
          rho = make_rho(rho_base);
          kkt = build_kkt(problem, options.sigma, rho);
          kkt.cholesky();
        }
      }
    }
  }

  sol.iterations = std::min(iter, options.max_iter);
  sol.y = x;
  sol.dual = lambda;
  return finish(sol);
}

}  // namespace corridor
