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
// Event-triggered broadcasting: the centralized rule (one condition over the
// whole network triggers a synchronous broadcast) and the decentralized rule
// (per-agent error thresholds plus a broadcast-proximity rule whose cascades
// realign the network and exclude Zeno behavior). Includes parameter
// selection, the broadcast ledger, and dwell-time instrumentation.
//
// Trigger conventions used here (documented prominently):
//  * The error thresholds compare squared errors against gamma_i^2 times the
//    squared field component. The squared form is the one the convergence
//    analysis and the parameter bound on gamma_i^2 actually use.
//  * "Equality with nonzero error" is implemented as >= with an explicit
//    e != 0 guard, so a freshly synced agent (e = 0) never self-triggers.

#ifndef ETOPT_TRIGGER_HPP_
#define ETOPT_TRIGGER_HPP_

#include <Eigen/Core>
#include <limits>
#include <optional>
#include <vector>

#include "etopt/dynamics.hpp"
#include "etopt/graph.hpp"
#include "etopt/problem.hpp"

namespace etopt {

// kappa obeys 0 < kappa < min{1/2, 2*M_lo/(5+3*M_hi)} and every gamma_i obeys
// r_min_i^2 < gamma_i^2 < min{1/12, M_lo^2/(2(5+3*M_hi)(M_hi+2))}. The
// constructor rejects violations.
struct TriggerParams {
  double kappa = 0.0;
  Eigen::VectorXd gamma;   // one per augmented-network agent
  Eigen::VectorXd r_min;   // one per augmented-network agent
  double bound_lo = 0.0;   // M_lo
  double bound_hi = 0.0;   // M_hi

  TriggerParams(double kappa_in, Eigen::VectorXd gamma_in, Eigen::VectorXd r_min_in,
                double bound_lo_in, double bound_hi_in);
};

// Upper admissible kappa, min{1/2, 2*M_lo/(5+3*M_hi)}.
double kappa_upper_bound(double bound_lo, double bound_hi);

// The printed bound on gamma_i^2: min{1/12, M_lo^2/(2(5+3*M_hi)(M_hi+2))}.
double gamma_squared_upper_bound(double bound_lo, double bound_hi);

// Largest gamma for which the Lyapunov decrement of the held dynamics is
// provably negative definite under the per-agent thresholds:
// with A = (M_hi+1)^2 + 2 and B = (M_hi+1)^2, the smallest positive root of
// (2A - B) g^2 - (A + 2*M_lo) g + M_lo = 0. The printed gamma bound above is
// necessary but not sufficient for large M_hi; this one closes the gap.
double gamma_stability_bound(double bound_lo, double bound_hi);

// kappa = safety * kappa_upper_bound; gamma_i = safety * min(sqrt(printed
// bound), stability bound), uniform over the n_agents augmented agents;
// r_min_i = gamma_i / 2. safety must lie strictly inside (0, 1).
TriggerParams select_params(double bound_lo, double bound_hi, int n_agents,
                            double safety = 0.9);

// h(y_held, mu_held) = (1-2k)|C y_held - d|^2
//                    + (M_lo - (5+3*M_hi) k/2)|g(y_held, mu_held)|^2.
double h_function(const ProblemInstance& p, const TriggerParams& params,
                  const Eigen::VectorXd& y_held, const Eigen::VectorXd& mu_held);

// True iff (2+M_hi)/k |e_y|^2 + 3/(2k) |e_mu|^2 >= h with nonzero error,
// where e_y = y - y_held and e_mu = mu - mu_held. On true the engine
// broadcasts all agents synchronously.
bool centralized_should_trigger(const ProblemInstance& p, const TriggerParams& params,
                                const PrimalDualState& s);

enum class EventKind { kStateBroadcast, kMultiplierBroadcast, kSyncCascade };
enum class EventCause { kErrorThreshold, kProximityRule };

struct EventRecord {
  double t = 0.0;
  int agent = 0;  // 0-based augmented index
  EventKind kind = EventKind::kStateBroadcast;
  EventCause cause = EventCause::kErrorThreshold;
};

// Broadcast ledger. Aggregate dwell statistics are maintained incrementally
// so that long runs can drop the per-record storage.
class EventLog {
 public:
  explicit EventLog(int n_agents, bool keep_records = true);

  void append(const EventRecord& rec);

  int n_agents() const { return static_cast<int>(count_per_agent_.size()); }
  long total() const { return total_; }
  const std::vector<long>& count_per_agent() const { return count_per_agent_; }
  const std::vector<EventRecord>& records() const { return records_; }
  bool empty() const { return total_ == 0; }

  // Gap between consecutive distinct event timestamps; synchronized
  // broadcasts share one timestamp and count as a single broadcast time.
  double min_gap_distinct_times() const { return min_gap_global_; }
  const std::vector<double>& min_gap_per_agent() const { return min_gap_per_agent_; }
  double last_time_of(int agent) const { return last_time_agent_[static_cast<size_t>(agent)]; }

 private:
  bool keep_records_ = true;
  long total_ = 0;
  std::vector<EventRecord> records_;
  std::vector<long> count_per_agent_;
  std::vector<double> last_time_agent_;
  std::vector<double> min_gap_per_agent_;
  double last_time_global_ = -1.0;
  double min_gap_global_ = std::numeric_limits<double>::infinity();
};

struct DwellReport {
  double min_gap_global = 0.0;
  std::vector<double> min_gap_per_agent;  // +inf for agents with < 2 events
  std::vector<long> count_per_agent;
};

// Minimum inter-event gaps and per-agent counts. Throws on an empty log.
DwellReport dwell_time_report(const EventLog& log);

// Decision for one agent of the decentralized rule at time `now`:
//  (i)  proximity: 0 < r_i <= r_min_i, where r_i = (latest broadcast among
//       augmented-graph neighbors before now) - (own latest before now);
//  (ii) error: e_i^2 >= gamma_i^2 * field_i^2 with e_i != 0, where field_i is
//       g_i(y_held, mu_held) for real agents and the constraint residual for
//       virtual agents.
// `held_field` must be primal_field(p, y_held, mu_held); `held_residual`
// must be dual_field(C, y_held). Returns the firing cause, or nullopt.
std::optional<EventCause> decentralized_should_trigger(
    int agent, const ProblemInstance& p, const TriggerParams& params,
    const PrimalDualState& s, const AugmentedNetwork& net,
    const Eigen::VectorXd& held_field, const Eigen::VectorXd& held_residual, double now);

}  // namespace etopt

#endif  // ETOPT_TRIGGER_HPP_
