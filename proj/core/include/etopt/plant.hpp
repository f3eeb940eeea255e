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
// Uncertain scalar agent dynamics
//
//   x_i' = (p_i(x_i) + dp_i(x_i)) + (b_i + db_i) u_i,
//
// the extended-state observer that estimates the tracking error e_i = x_i -
// y_i together with the lumped disturbance, and the cancelling controller.
// The controller sees only the known quantities (p_i, b_i, the measurement
// x_i and the local reference y_i); dp_i and db_i drive the plant only.

#ifndef ETOPT_PLANT_HPP_
#define ETOPT_PLANT_HPP_

#include <Eigen/Core>
#include <functional>
#include <utility>
#include <vector>

#include "etopt/dynamics.hpp"
#include "etopt/graph.hpp"
#include "etopt/problem.hpp"

namespace etopt {

struct AgentPlant {
  std::function<double(double)> p_known;   // p_i
  std::function<double(double)> delta_p;   // dp_i, hidden from the controller
  double b_known = 1.0;                    // b_i != 0
  double delta_b = 0.0;                    // db_i, hidden
  double rho_b = 0.0;                      // |db_i| <= rho_b
  double lipschitz_p = 0.0;                // L_{p_i} on the simulated range
};

// Observer state (e_hat, e_bar_hat) with its gains. eps > 0; alpha < 0.
struct ObserverState {
  double e_hat = 0.0;
  double e_bar_hat = 0.0;
  double eps = 0.01;
  double k1 = 2.0;
  double k2 = 1.0;
  double alpha = -1.0;
};

struct GainMargin {
  double L_value = 0.0;
  bool satisfied = false;
  bool defined = true;  // false when the closed-form denominator vanishes
};

// L = 2 k1 k2 / (-k1^2 - (k2-1)^2 + sqrt((k1^2+(k2-1)^2)(k1^2+(k2+1)^2)))
// evaluated verbatim, and the test (L_p + rho_b/b) k2 < L. Purely
// diagnostic: the verbatim sign convention (k1 < 0) conflicts with the
// stability of the written observer equations, so runs record the margin
// without acting on it.
GainMargin ladrc_gain_margin(double L_p, double rho_b, double b, double k1, double k2);

// One RK4 step of the plant with u held constant (zero-order hold).
double plant_step(const AgentPlant& plant, double x, double u, double dt);

// Computes the control from the current observer state, then advances the
// observer one RK4 step with the measurement (x - y) and the reference y
// held over the step. Returns the new observer state and the applied u.
std::pair<ObserverState, double> observer_controller_step(
    const ObserverState& obs, const std::function<double(double)>& p_known, double b_known,
    double x, double y, double dt);

// Full simulation state of the optimization layer plus the physical layer.
struct SimState {
  PrimalDualState pd;
  Eigen::VectorXd x;
  Eigen::VectorXd u;
  std::vector<ObserverState> observers;
};

// y(0) = x(0), mu(0) = 0, observers at rest, all held copies equal to the
// initial values, and every broadcast ledger entry set to t = 0.
SimState algorithm1_init(const ProblemInstance& p, const AugmentedNetwork& net,
                         const std::vector<AgentPlant>& plants, const Eigen::VectorXd& x0,
                         double eps, double alpha = -1.0, double k1 = 2.0, double k2 = 1.0);

}  // namespace etopt

#endif  // ETOPT_PLANT_HPP_
