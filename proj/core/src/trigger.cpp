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

#include "etopt/trigger.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace etopt {

double kappa_upper_bound(double bound_lo, double bound_hi) {
  return std::min(0.5, 2.0 * bound_lo / (5.0 + 3.0 * bound_hi));
}

double gamma_squared_upper_bound(double bound_lo, double bound_hi) {
  return std::min(1.0 / 12.0,
                  bound_lo * bound_lo /
                      (2.0 * (5.0 + 3.0 * bound_hi) * (bound_hi + 2.0)));
}

double gamma_stability_bound(double bound_lo, double bound_hi) {
  const double a = (bound_hi + 1.0) * (bound_hi + 1.0) + 2.0;
  const double b = (bound_hi + 1.0) * (bound_hi + 1.0);
  // (2a - b) g^2 - (a + 2*M_lo) g + M_lo = 0, smallest positive root.
  const double qa = 2.0 * a - b;
  const double qb = -(a + 2.0 * bound_lo);
  const double qc = bound_lo;
  const double disc = qb * qb - 4.0 * qa * qc;
  return (-qb - std::sqrt(disc)) / (2.0 * qa);
}

TriggerParams::TriggerParams(double kappa_in, Eigen::VectorXd gamma_in,
                             Eigen::VectorXd r_min_in, double bound_lo_in, double bound_hi_in)
    : kappa(kappa_in),
      gamma(std::move(gamma_in)),
      r_min(std::move(r_min_in)),
      bound_lo(bound_lo_in),
      bound_hi(bound_hi_in) {
  if (!(bound_lo > 0.0) || !(bound_hi >= bound_lo)) {
    throw InvalidProblemError("TriggerParams: invalid curvature bounds");
  }
  if (gamma.size() != r_min.size() || gamma.size() == 0) {
    throw InvalidProblemError("TriggerParams: gamma and r_min must have equal nonzero length");
  }
  if (!(kappa > 0.0) || !(kappa < kappa_upper_bound(bound_lo, bound_hi))) {
    throw InvalidProblemError("TriggerParams: kappa outside (0, min{1/2, 2*M_lo/(5+3*M_hi)})");
  }
  const double g2_max = gamma_squared_upper_bound(bound_lo, bound_hi);
  for (Eigen::Index i = 0; i < gamma.size(); ++i) {
    if (!(gamma[i] > 0.0) || !(r_min[i] > 0.0)) {
      throw InvalidProblemError("TriggerParams: gamma and r_min must be strictly positive");
    }
    const double g2 = gamma[i] * gamma[i];
    if (!(r_min[i] * r_min[i] < g2) || !(g2 < g2_max)) {
      throw InvalidProblemError("TriggerParams: need r_min_i^2 < gamma_i^2 < bound at agent " +
                                std::to_string(i + 1));
    }
  }
}

TriggerParams select_params(double bound_lo, double bound_hi, int n_agents, double safety) {
  if (!(bound_lo > 0.0) || !(bound_hi >= bound_lo)) {
    throw InvalidProblemError("select_params: need 0 < M_lo <= M_hi");
  }
  if (!(safety > 0.0) || !(safety < 1.0)) {
    throw InvalidProblemError("select_params: safety must lie strictly inside (0, 1)");
  }
  if (n_agents <= 0) throw InvalidProblemError("select_params: need at least one agent");
  const double kappa = safety * kappa_upper_bound(bound_lo, bound_hi);
  const double g = safety * std::min(std::sqrt(gamma_squared_upper_bound(bound_lo, bound_hi)),
                                     gamma_stability_bound(bound_lo, bound_hi));
  Eigen::VectorXd gamma = Eigen::VectorXd::Constant(n_agents, g);
  Eigen::VectorXd r_min = Eigen::VectorXd::Constant(n_agents, g / 2.0);
  return TriggerParams(kappa, std::move(gamma), std::move(r_min), bound_lo, bound_hi);
}

double h_function(const ProblemInstance& p, const TriggerParams& params,
                  const Eigen::VectorXd& y_held, const Eigen::VectorXd& mu_held) {
  const Eigen::VectorXd g = primal_field(p, y_held, mu_held);
  const Eigen::VectorXd w = dual_field(p.constraints(), y_held);
  const double c1 = 1.0 - 2.0 * params.kappa;
  const double c2 = params.bound_lo - 0.5 * (5.0 + 3.0 * params.bound_hi) * params.kappa;
  return c1 * w.squaredNorm() + c2 * g.squaredNorm();
}

bool centralized_should_trigger(const ProblemInstance& p, const TriggerParams& params,
                                const PrimalDualState& s) {
  const Eigen::VectorXd ey = s.y - s.y_held;
  const Eigen::VectorXd em = s.mu - s.mu_held;
  const double err2 = ey.squaredNorm() + em.squaredNorm();
  if (err2 == 0.0) return false;
  const double lhs = (2.0 + params.bound_hi) / params.kappa * ey.squaredNorm() +
                     1.5 / params.kappa * em.squaredNorm();
  return lhs >= h_function(p, params, s.y_held, s.mu_held);
}

EventLog::EventLog(int n_agents, bool keep_records)
    : keep_records_(keep_records),
      count_per_agent_(static_cast<size_t>(n_agents), 0),
      last_time_agent_(static_cast<size_t>(n_agents), -1.0),
      min_gap_per_agent_(static_cast<size_t>(n_agents),
                         std::numeric_limits<double>::infinity()) {}

void EventLog::append(const EventRecord& rec) {
  const auto a = static_cast<size_t>(rec.agent);
  if (a >= count_per_agent_.size()) throw ContractViolationError("EventLog: agent out of range");
  if (last_time_agent_[a] >= 0.0) {
    const double gap = rec.t - last_time_agent_[a];
    if (gap <= 0.0) {
      throw ContractViolationError("EventLog: non-increasing timestamps for agent " +
                                   std::to_string(rec.agent + 1));
    }
    min_gap_per_agent_[a] = std::min(min_gap_per_agent_[a], gap);
  }
  last_time_agent_[a] = rec.t;
  if (last_time_global_ >= 0.0 && rec.t > last_time_global_) {
    min_gap_global_ = std::min(min_gap_global_, rec.t - last_time_global_);
  }
  if (rec.t < last_time_global_) {
    throw ContractViolationError("EventLog: timestamps must be non-decreasing");
  }
  last_time_global_ = std::max(last_time_global_, rec.t);
  ++total_;
  ++count_per_agent_[a];
  if (keep_records_) records_.push_back(rec);
}

DwellReport dwell_time_report(const EventLog& log) {
  if (log.empty()) throw ContractViolationError("dwell_time_report: empty event log");
  DwellReport r;
  r.min_gap_global = log.min_gap_distinct_times();
  r.min_gap_per_agent = log.min_gap_per_agent();
  r.count_per_agent = log.count_per_agent();
  return r;
}

std::optional<EventCause> decentralized_should_trigger(
    int agent, const ProblemInstance& p, const TriggerParams& params,
    const PrimalDualState& s, const AugmentedNetwork& net,
    const Eigen::VectorXd& held_field, const Eigen::VectorXd& held_residual, double now) {
  const int n = net.n_real;
  if (agent < 0 || agent >= net.total()) {
    throw ContractViolationError("decentralized_should_trigger: agent out of range");
  }

  // Proximity rule. Broadcast times at `now` itself do not count for the own
  // term (r compares the most recent strictly-earlier own broadcast), but a
  // neighbor that already fired in this instant participates: that is the
  // cascade that realigns the network at one shared timestamp.
  const double own = s.last_broadcast[agent];
  if (own < now) {
    double nb = -std::numeric_limits<double>::infinity();
    for (int j : net.neighbors[static_cast<size_t>(agent)]) {
      nb = std::max(nb, s.last_broadcast[j]);
    }
    const double r = nb - own;
    if (r > 0.0 && r <= params.r_min[agent]) return EventCause::kProximityRule;
  }

  const double e = agent < n ? s.y[agent] - s.y_held[agent]
                             : s.mu[agent - n] - s.mu_held[agent - n];
  if (e != 0.0) {
    const double field = agent < n ? held_field[agent] : held_residual[agent - n];
    const double g2 = params.gamma[agent] * params.gamma[agent];
    if (e * e >= g2 * field * field) return EventCause::kErrorThreshold;
  }
  return std::nullopt;
}

}  // namespace etopt
