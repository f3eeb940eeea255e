// Copyright 2026 The etopt Authors
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

#include "etopt/problem.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

namespace etopt {

ScalarObjective ScalarObjective::Quadratic(double a, double b, double c) {
  if (!(a > 0.0)) {
    throw InvalidProblemError("quadratic objective requires a > 0 (strict convexity), got a = " +
                              std::to_string(a));
  }
  ScalarObjective o;
  o.quadratic_ = true;
  o.a_ = a;
  o.b_ = b;
  o.c_ = c;
  o.lo_ = 2.0 * a;
  o.hi_ = 2.0 * a;
  return o;
}

ScalarObjective ScalarObjective::Custom(Fn value, Fn gradient, Fn second_derivative,
                                        double second_deriv_lo, double second_deriv_hi) {
  if (!(second_deriv_lo > 0.0) || !(second_deriv_hi >= second_deriv_lo)) {
    throw InvalidProblemError("custom objective requires 0 < second_deriv_lo <= second_deriv_hi");
  }
  if (!value || !gradient || !second_derivative) {
    throw InvalidProblemError("custom objective requires value/gradient/second-derivative evaluators");
  }
  ScalarObjective o;
  o.quadratic_ = false;
  o.value_ = std::move(value);
  o.grad_ = std::move(gradient);
  o.second_ = std::move(second_derivative);
  o.lo_ = second_deriv_lo;
  o.hi_ = second_deriv_hi;
  return o;
}

double ScalarObjective::value(double x) const {
  return quadratic_ ? (a_ * x * x + b_ * x + c_) : value_(x);
}

double ScalarObjective::gradient(double x) const {
  return quadratic_ ? (2.0 * a_ * x + b_) : grad_(x);
}

double ScalarObjective::second_derivative(double x) const {
  return quadratic_ ? 2.0 * a_ : second_(x);
}

bool ValidationReport::all_strictly_convex() const {
  return std::all_of(strictly_convex.begin(), strictly_convex.end(), [](bool b) { return b; });
}

ProblemInstance::ProblemInstance(std::vector<ScalarObjective> objectives,
                                 ConstraintSystem constraints)
    : objectives_(std::move(objectives)), constraints_(std::move(constraints)) {
  const auto n = static_cast<Eigen::Index>(objectives_.size());
  if (n == 0) throw InvalidProblemError("problem has no objectives");
  if (constraints_.C.cols() != n) {
    throw InvalidProblemError("constraint column count does not match objective count");
  }
  if (constraints_.C.rows() != constraints_.d.size()) {
    throw InvalidProblemError("constraint matrix rows and right-hand side length differ");
  }
  if (constraints_.C.rows() > constraints_.C.cols()) {
    throw InvalidProblemError("more constraint rows than variables (m > n)");
  }
  bound_lo_ = objectives_.front().second_deriv_lo();
  bound_hi_ = objectives_.front().second_deriv_hi();
  for (const auto& o : objectives_) {
    bound_lo_ = std::min(bound_lo_, o.second_deriv_lo());
    bound_hi_ = std::max(bound_hi_, o.second_deriv_hi());
  }
  if (!(bound_lo_ > 0.0) || !(bound_hi_ >= bound_lo_)) {
    throw InvalidProblemError("second-derivative bounds must satisfy 0 < lo <= hi");
  }
}

double ProblemInstance::objective_value(const Eigen::VectorXd& y) const {
  if (y.size() != num_agents()) throw ContractViolationError("objective_value: dimension mismatch");
  double s = 0.0;
  for (Eigen::Index i = 0; i < y.size(); ++i) s += objectives_[static_cast<size_t>(i)].value(y[i]);
  return s;
}

Eigen::VectorXd ProblemInstance::gradient(const Eigen::VectorXd& y) const {
  if (y.size() != num_agents()) throw ContractViolationError("gradient: dimension mismatch");
  Eigen::VectorXd g(y.size());
  for (Eigen::Index i = 0; i < y.size(); ++i) g[i] = objectives_[static_cast<size_t>(i)].gradient(y[i]);
  return g;
}

double spectral_radius_ctc(const Eigen::MatrixXd& C) {
  constexpr double kRelTol = 1e-12;
  constexpr int kMaxIters = 100000;
  const Eigen::Index n = C.cols();
  if (C.size() == 0 || C.norm() == 0.0) {
    throw InvalidProblemError("spectral_radius_ctc: zero constraint matrix");
  }
  // Fixed-seed start vector keeps repeated runs bit-identical.
  std::mt19937_64 rng(0xE70ull);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = unit(rng);
  v.normalize();

  double lambda = 0.0;
  for (int it = 0; it < kMaxIters; ++it) {
    Eigen::VectorXd w = C.transpose() * (C * v);
    const double norm = w.norm();
    if (norm == 0.0) {
      // v landed in the null space; restart deterministically shifted.
      for (Eigen::Index i = 0; i < n; ++i) v[i] = unit(rng);
      v.normalize();
      continue;
    }
    w /= norm;
    const double next = w.dot(C.transpose() * (C * w));
    if (std::abs(next - lambda) <= kRelTol * std::max(1.0, std::abs(next))) {
      return next;
    }
    lambda = next;
    v = w;
  }
  return lambda;
}

ConstraintSystem normalize_constraints(const ConstraintSystem& cs) {
  const double p = spectral_radius_ctc(cs.C);
  if (!(p > 0.0)) throw InvalidProblemError("normalize_constraints: zero constraint matrix");
  const double s = std::sqrt(p);
  ConstraintSystem out;
  out.C = cs.C / s;
  out.d = cs.d / s;
  out.normalized = true;
  return out;
}

int matrix_row_rank(const Eigen::MatrixXd& A) {
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(A);
  qr.setThreshold(1e-10);
  return static_cast<int>(qr.rank());
}

ValidationReport validate_assumptions(const ProblemInstance& p) {
  ValidationReport r;
  const auto& cs = p.constraints();
  r.row_rank = matrix_row_rank(cs.C);
  r.full_row_rank = (r.row_rank == cs.rows());
  if (!r.full_row_rank) {
    std::ostringstream os;
    os << "row-rank deficient: rank " << r.row_rank << " of " << cs.rows() << " rows";
    r.warnings.push_back(os.str());
  }
  r.strictly_convex.reserve(static_cast<size_t>(p.num_agents()));
  for (Eigen::Index i = 0; i < p.num_agents(); ++i) {
    const auto& o = p.objective(i);
    bool convex = o.second_deriv_lo() > 0.0;
    if (!o.is_quadratic()) {
      // Sampled probe: declared bounds must hold at a spread of points.
      for (double x : {-10.0, -1.0, -0.1, 0.0, 0.1, 1.0, 10.0}) {
        const double s = o.second_derivative(x);
        if (s < o.second_deriv_lo() - 1e-9 || s > o.second_deriv_hi() + 1e-9) {
          convex = false;
          r.warnings.push_back("agent " + std::to_string(i + 1) +
                               ": sampled second derivative outside declared bounds");
          break;
        }
      }
    }
    r.strictly_convex.push_back(convex);
    if (!convex) {
      r.warnings.push_back("agent " + std::to_string(i + 1) + ": strict convexity violated");
    }
  }
  r.bounds_sane = p.bound_lo() > 0.0 && p.bound_hi() >= p.bound_lo();
  if (!cs.normalized) {
    const double rho = spectral_radius_ctc(cs.C);
    if (std::abs(rho - 1.0) > 1e-9) {
      r.warnings.push_back("constraints not normalized: rho(C^T C) = " + std::to_string(rho));
    }
  }
  return r;
}

namespace {

// Assembles and solves the saddle system for given gradient/Hessian data.
// Returns (solution, consistent_rank_info) via out-params.
Eigen::VectorXd solve_kkt_linear(const Eigen::MatrixXd& K, const Eigen::VectorXd& rhs,
                                 bool singular) {
  if (!singular) {
    return Eigen::PartialPivLU<Eigen::MatrixXd>(K).solve(rhs);
  }
  // Minimum-norm solution of the consistent singular system. y is unique by
  // strict convexity; minimizing the full vector norm therefore minimizes
  // the multiplier norm.
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(K);
  return cod.solve(rhs);
}

}  // namespace

KktSolution kkt_solve(const ProblemInstance& p) {
  const auto& cs = p.constraints();
  const Eigen::Index n = p.num_agents();
  const Eigen::Index m = cs.rows();

  for (Eigen::Index i = 0; i < n; ++i) {
    if (!(p.objective(i).second_deriv_lo() > 0.0)) {
      throw OracleUnsupportedError("kkt_solve: non-convex objective at agent " +
                                   std::to_string(i + 1));
    }
  }

  // Feasibility precheck: rank([C | d]) must equal rank(C).
  const int rank_c = matrix_row_rank(cs.C);
  Eigen::MatrixXd Cd(m, n + 1);
  Cd.leftCols(n) = cs.C;
  Cd.col(n) = cs.d;
  if (matrix_row_rank(Cd) > rank_c) {
    throw InfeasibleError("kkt_solve: inconsistent constraint rows (no feasible point)");
  }
  const bool deficient = rank_c < m;

  Eigen::VectorXd sol(n + m);
  if (std::all_of(p.objectives().begin(), p.objectives().end(),
                  [](const ScalarObjective& o) { return o.is_quadratic(); })) {
    Eigen::MatrixXd K = Eigen::MatrixXd::Zero(n + m, n + m);
    Eigen::VectorXd rhs(n + m);
    for (Eigen::Index i = 0; i < n; ++i) {
      K(i, i) = 2.0 * p.objective(i).quad_a();
      rhs[i] = -p.objective(i).quad_b();
    }
    K.topRightCorner(n, m) = cs.C.transpose();
    K.bottomLeftCorner(m, n) = cs.C;
    rhs.tail(m) = cs.d;
    sol = solve_kkt_linear(K, rhs, deficient);
  } else {
    // Damped Newton on R(y, mu) = [grad f(y) + C^T mu; C y - d].
    Eigen::VectorXd y = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd mu = Eigen::VectorXd::Zero(m);
    auto residual = [&](const Eigen::VectorXd& yy, const Eigen::VectorXd& mm) {
      Eigen::VectorXd r(n + m);
      r.head(n) = p.gradient(yy) + cs.C.transpose() * mm;
      r.tail(m) = cs.C * yy - cs.d;
      return r;
    };
    for (int it = 0; it < 200; ++it) {
      Eigen::VectorXd r = residual(y, mu);
      if (r.norm() <= 1e-14 * (1.0 + cs.d.norm())) break;
      Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n + m, n + m);
      for (Eigen::Index i = 0; i < n; ++i) J(i, i) = p.objective(i).second_derivative(y[i]);
      J.topRightCorner(n, m) = cs.C.transpose();
      J.bottomLeftCorner(m, n) = cs.C;
      Eigen::VectorXd step = solve_kkt_linear(J, -r, deficient);
      double alpha = 1.0;
      const double r0 = r.squaredNorm();
      while (alpha > 1e-8) {
        Eigen::VectorXd yt = y + alpha * step.head(n);
        Eigen::VectorXd mt = mu + alpha * step.tail(m);
        if (residual(yt, mt).squaredNorm() < r0) {
          y = yt;
          mu = mt;
          break;
        }
        alpha *= 0.5;
      }
      if (alpha <= 1e-8) break;
    }
    if (deficient) {
      // Project the multiplier onto range(C) for the minimum-norm choice.
      Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(cs.C.transpose());
      mu = cs.C * cod.solve(cs.C.transpose() * mu);
    }
    sol.head(n) = y;
    sol.tail(m) = mu;
  }

  KktSolution out;
  out.y_star = sol.head(n);
  out.mu_star = sol.tail(m);
  out.multiplier_unique = !deficient;

  const Eigen::VectorXd grad = p.gradient(out.y_star);
  const double stat = (grad + cs.C.transpose() * out.mu_star).norm();
  const double feas = (cs.C * out.y_star - cs.d).norm();
  out.residual = std::max(stat, feas);
  if (feas > 1e-8 * (1.0 + cs.d.norm()) || stat > 1e-8 * (1.0 + grad.norm())) {
    throw InfeasibleError("kkt_solve: solution failed the KKT residual check");
  }
  return out;
}

}  // namespace etopt
