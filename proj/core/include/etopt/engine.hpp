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
// The simulation engine. Per tick it evaluates triggers and commits
// broadcasts in ascending agent order (with same-instant cascade closure of
// the proximity rule), advances the optimization layer, steps the observer/
// controller and plant for uncertain runs, applies scheduled perturbations
// snapped to tick boundaries, and logs. Runs are deterministic: the same
// configuration and seed produce byte-identical output files.

#ifndef ETOPT_ENGINE_HPP_
#define ETOPT_ENGINE_HPP_

#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "etopt/plant.hpp"
#include "etopt/scenarios.hpp"
#include "etopt/trigger.hpp"

namespace etopt {

enum class Mode { kContinuous, kCentralized, kDecentralized };
enum class PlantModel { kIdeal, kUncertain };

struct RunConfig {
  Mode mode = Mode::kDecentralized;
  PlantModel plant = PlantModel::kIdeal;
  double dt = 0.0;        // 0 = auto: min(min_i r_min_i / 10, 1e-3)
  double t_final = 20.0;
  double eps = 0.005;     // observer time-scale (uncertain plant only)
  uint64_t seed = 1;
  double safety = 0.9;    // trigger parameter safety factor
  std::string scenario;   // "case1" | "case2", or empty with files below
  std::string problem_file;
  std::string graph_file;
  std::string out_dir;    // empty = no file output
  int stride = 0;         // 0 = auto; states/metrics row every `stride` ticks
  bool apply_schedule = true;
  bool force_broadcast_every_tick = false;  // the gamma -> 0 comparison mode
  bool keep_event_records = true;
  std::optional<double> stop_on_primal_error;
  double alpha = -1.0;    // controller gain, < 0
  double k1 = 2.0;        // observer gains
  double k2 = 1.0;
};

struct RunMetrics {
  long ticks = 0;
  double t_end = 0.0;
  double dt_used = 0.0;
  double final_primal_error = 0.0;   // |y(T) - y*| against the current oracle
  double final_tracking_error = 0.0; // max_i |x_i(T) - y_i(T)|, 0 for ideal
  long event_count = 0;
  std::vector<long> events_per_agent;
  std::vector<EventRecord> events;   // full ledger when keep_event_records
  double min_event_gap_global = 0.0; // between distinct broadcast instants
  std::vector<double> min_event_gap_per_agent;
  double max_lyapunov_increase = 0.0;   // max over ticks of (v' - v)/(1 + v)
  long lyapunov_strict_violations = 0;  // v' >= v while far from equilibrium
  std::vector<std::pair<double, double>> lyapunov_trace;  // downsampled (t, v)
  // Primal error against the oracle in force, sampled just before each
  // perturbation and at the end of the run.
  std::vector<std::pair<double, double>> window_errors;
  KktSolution oracle;  // oracle after the last perturbation
  std::optional<TriggerParams> params;
  double bound_lo = 0.0;
  double bound_hi = 0.0;
  int flood_rounds = 0;
  GainMargin gain_margin;
  double wall_seconds = 0.0;
};

// Test hook invoked after every completed tick.
class TickObserver {
 public:
  virtual ~TickObserver() = default;
  virtual void on_tick(double t, const SimState& state) = 0;
};

// Builds the scenario named by the config (or loads problem/graph files) and
// simulates it. Throws ConfigError, DivergenceError, ScenarioError.
RunMetrics run(const RunConfig& config, TickObserver* observer = nullptr);

// Simulates an in-memory scenario (the engine takes its own mutable copy).
RunMetrics run_scenario(Scenario scenario, const RunConfig& config,
                        TickObserver* observer = nullptr);

struct CommunicationReport {
  RunMetrics a;
  RunMetrics b;
  long events_a = 0;
  long events_b = 0;
  double event_ratio = 0.0;  // events_a / events_b
};

// Runs both configurations on the same problem and compares broadcast
// economy at their respective final errors.
CommunicationReport compare_communication(const RunConfig& config_a, const RunConfig& config_b);

const char* to_string(Mode m);
const char* to_string(PlantModel p);

}  // namespace etopt

#endif  // ETOPT_ENGINE_HPP_
