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
//
// Equality-constrained separable convex program
//
//   min  f(y) = sum_i f_i(y_i)   s.t.  C y = d,
//
// together with its validity checks and a direct KKT oracle used as
// ground truth throughout the test suites. Instances are immutable after
// construction and safe to share read-only across threads.

#ifndef ETOPT_PROBLEM_HPP_
#define ETOPT_PROBLEM_HPP_

#include <Eigen/Core>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "etopt/errors.hpp"

namespace etopt {

// One agent's scalar objective f_i. Either an explicit strictly convex
// quadratic a*x^2 + b*x + c (a > 0) or a user-supplied smooth function with
// declared second-derivative bounds 0 < lo <= f_i'' <= hi.
class ScalarObjective {
 public:
  using Fn = std::function<double(double)>;

  static ScalarObjective Quadratic(double a, double b = 0.0, double c = 0.0);
  static ScalarObjective Custom(Fn value, Fn gradient, Fn second_derivative,
                                double second_deriv_lo, double second_deriv_hi);

  double value(double x) const;
  double gradient(double x) const;
  double second_derivative(double x) const;

  bool is_quadratic() const { return quadratic_; }
  double quad_a() const { return a_; }
  double quad_b() const { return b_; }
  double quad_c() const { return c_; }
  double second_deriv_lo() const { return lo_; }
  double second_deriv_hi() const { return hi_; }

 private:
  ScalarObjective() = default;

  bool quadratic_ = true;
  double a_ = 0.0, b_ = 0.0, c_ = 0.0;
  Fn value_, grad_, second_;
  double lo_ = 0.0, hi_ = 0.0;
};

// The pair (C, d) of the equality constraints C y = d, m rows and n columns
// with m <= n. `normalized` records whether rho(C^T C) has been scaled to 1.
struct ConstraintSystem {
  Eigen::MatrixXd C;
  Eigen::VectorXd d;
  bool normalized = false;

  Eigen::Index rows() const { return C.rows(); }
  Eigen::Index cols() const { return C.cols(); }
};

struct KktSolution {
  Eigen::VectorXd y_star;
  Eigen::VectorXd mu_star;
  double residual = 0.0;        // norm of the KKT system residual
  bool multiplier_unique = true;
};

struct ValidationReport {
  int row_rank = 0;
  bool full_row_rank = false;
  std::vector<bool> strictly_convex;  // per agent
  bool bounds_sane = false;           // 0 < bound_lo <= bound_hi
  std::vector<std::string> warnings;

  bool all_strictly_convex() const;
};

class ProblemInstance {
 public:
  // Throws InvalidProblemError on dimension mismatch or non-positive
  // curvature bounds. bound_lo/bound_hi are derived from the objectives.
  ProblemInstance(std::vector<ScalarObjective> objectives, ConstraintSystem constraints);

  Eigen::Index num_agents() const { return static_cast<Eigen::Index>(objectives_.size()); }
  Eigen::Index num_constraints() const { return constraints_.rows(); }

  const std::vector<ScalarObjective>& objectives() const { return objectives_; }
  const ScalarObjective& objective(Eigen::Index i) const { return objectives_[static_cast<size_t>(i)]; }
  const ConstraintSystem& constraints() const { return constraints_; }

  double bound_lo() const { return bound_lo_; }
  double bound_hi() const { return bound_hi_; }

  double objective_value(const Eigen::VectorXd& y) const;
  Eigen::VectorXd gradient(const Eigen::VectorXd& y) const;
  std::pair<double, double> second_derivative_bounds() const { return {bound_lo_, bound_hi_}; }

 private:
  std::vector<ScalarObjective> objectives_;
  ConstraintSystem constraints_;
  double bound_lo_ = 0.0;
  double bound_hi_ = 0.0;
};

// Largest eigenvalue of C^T C by power iteration (relative tolerance 1e-12,
// at most 1e5 iterations, fixed-seed start vector). Deterministic.
double spectral_radius_ctc(const Eigen::MatrixXd& C);

// Scales (C, d) by 1/sqrt(rho(C^T C)) so that rho(C'^T C') = 1.
// Throws InvalidProblemError if C is (numerically) zero.
ConstraintSystem normalize_constraints(const ConstraintSystem& cs);

// Reports rank, convexity and bound sanity. Never throws on deficiency;
// rank-deficient rows are reported as warnings.
ValidationReport validate_assumptions(const ProblemInstance& p);

// Row rank of a matrix by column-pivoted QR with a scaled threshold.
int matrix_row_rank(const Eigen::MatrixXd& A);

// Direct solve of the stationarity + feasibility system
//   [ diag(f'') C^T ] [y]   [-b]
//   [ C          0  ] [mu] = [ d]
// for quadratic objectives; damped Newton on the KKT residual otherwise.
// Row-rank-deficient C yields the minimum-norm multiplier and
// multiplier_unique = false. Throws OracleUnsupportedError for non-convex
// objectives and InfeasibleError for inconsistent constraints.
KktSolution kkt_solve(const ProblemInstance& p);

}  // namespace etopt

#endif  // ETOPT_PROBLEM_HPP_
