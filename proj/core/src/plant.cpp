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

#include "etopt/plant.hpp"

#include <cmath>

namespace etopt {

GainMargin ladrc_gain_margin(double L_p, double rho_b, double b, double k1, double k2) {
  if (b == 0.0) throw ContractViolationError("ladrc_gain_margin: b must be nonzero");
  GainMargin m;
  const double k1sq = k1 * k1;
  const double km = (k2 - 1.0) * (k2 - 1.0);
  const double kp = (k2 + 1.0) * (k2 + 1.0);
  const double denom = -k1sq - km + std::sqrt((k1sq + km) * (k1sq + kp));
  if (std::abs(denom) < 1e-14) {
    m.defined = false;
    m.L_value = 0.0;
    m.satisfied = false;
    return m;
  }
  m.L_value = 2.0 * k1 * k2 / denom;
  m.satisfied = (L_p + rho_b / b) * k2 < m.L_value;
  return m;
}

double plant_step(const AgentPlant& plant, double x, double u, double dt) {
  if (!(dt > 0.0)) throw ContractViolationError("plant_step: dt must be positive");
  const double beff = plant.b_known + plant.delta_b;
  auto f = [&](double xv) {
    double rate = plant.p_known ? plant.p_known(xv) : 0.0;
    if (plant.delta_p) rate += plant.delta_p(xv);
    return rate + beff * u;
  };
  const double k1 = f(x);
  const double k2 = f(x + 0.5 * dt * k1);
  const double k3 = f(x + 0.5 * dt * k2);
  const double k4 = f(x + dt * k3);
  const double next = x + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  if (!std::isfinite(next) || std::abs(next) > kDivergenceNorm) {
    throw DivergenceError("plant state diverged");
  }
  return next;
}

std::pair<ObserverState, double> observer_controller_step(
    const ObserverState& obs, const std::function<double(double)>& p_known, double b_known,
    double x, double y, double dt) {
  if (!(obs.eps > 0.0)) throw ContractViolationError("observer_controller_step: eps must be > 0");
  if (!(dt > 0.0)) throw ContractViolationError("observer_controller_step: dt must be positive");
  auto p = [&](double v) { return p_known ? p_known(v) : 0.0; };

  // Control from the current estimates; it is the signal applied over
  // [t, t+dt) and also the input the observer assumes during the step.
  const double u =
      (obs.alpha * obs.e_hat - obs.e_bar_hat - p(obs.e_hat + y) + p(y)) / b_known;

  const double meas = x - y;  // held over the step
  auto f = [&](double e1, double e2, double& d1, double& d2) {
    d1 = e2 + (p(e1 + y) - p(y)) + (obs.k1 / obs.eps) * (meas - e1) + b_known * u;
    d2 = (obs.k2 / (obs.eps * obs.eps)) * (meas - e1);
  };
  double a1, b1, a2, b2, a3, b3, a4, b4;
  f(obs.e_hat, obs.e_bar_hat, a1, b1);
  f(obs.e_hat + 0.5 * dt * a1, obs.e_bar_hat + 0.5 * dt * b1, a2, b2);
  f(obs.e_hat + 0.5 * dt * a2, obs.e_bar_hat + 0.5 * dt * b2, a3, b3);
  f(obs.e_hat + dt * a3, obs.e_bar_hat + dt * b3, a4, b4);

  ObserverState next = obs;
  next.e_hat += dt / 6.0 * (a1 + 2.0 * a2 + 2.0 * a3 + a4);
  next.e_bar_hat += dt / 6.0 * (b1 + 2.0 * b2 + 2.0 * b3 + b4);
  if (!std::isfinite(next.e_hat) || !std::isfinite(next.e_bar_hat)) {
    throw DivergenceError("observer state diverged");
  }
  return {next, u};
}

SimState algorithm1_init(const ProblemInstance& p, const AugmentedNetwork& net,
                         const std::vector<AgentPlant>& plants, const Eigen::VectorXd& x0,
                         double eps, double alpha, double k1, double k2) {
  const Eigen::Index n = p.num_agents();
  const Eigen::Index m = p.num_constraints();
  if (net.n_real != n || net.n_virtual != m) {
    throw ContractViolationError("algorithm1_init: network does not match problem dimensions");
  }
  if (x0.size() != n) throw ContractViolationError("algorithm1_init: x0 has wrong length");
  if (!plants.empty() && static_cast<Eigen::Index>(plants.size()) != n) {
    throw ContractViolationError("algorithm1_init: plant count does not match agent count");
  }
  SimState s;
  s.pd = PrimalDualState::Zero(n, m);
  s.pd.y = x0;
  s.pd.y_held = x0;
  s.x = x0;
  s.u = Eigen::VectorXd::Zero(n);
  s.observers.resize(static_cast<size_t>(n));
  for (auto& o : s.observers) {
    o = ObserverState{};
    o.eps = eps;
    o.alpha = alpha;
    o.k1 = k1;
    o.k2 = k2;
  }
  return s;
}

}  // namespace etopt
