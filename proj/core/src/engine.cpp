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

#include "etopt/engine.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>

#include <json.hpp>

#include "etopt/io.hpp"

namespace etopt {

using nlohmann::json;

const char* to_string(Mode m) {
  switch (m) {
    case Mode::kContinuous: return "continuous";
    case Mode::kCentralized: return "centralized";
    case Mode::kDecentralized: return "decentralized";
  }
  return "?";
}

const char* to_string(PlantModel p) {
  return p == PlantModel::kIdeal ? "ideal" : "uncertain";
}

namespace {

const char* kind_name(EventKind k) {
  switch (k) {
    case EventKind::kStateBroadcast: return "state-broadcast";
    case EventKind::kMultiplierBroadcast: return "multiplier-broadcast";
    case EventKind::kSyncCascade: return "sync-cascade";
  }
  return "?";
}

const char* cause_name(EventCause c) {
  return c == EventCause::kErrorThreshold ? "error-threshold" : "proximity-rule";
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// Lyapunov candidate: v = |g(y,mu)|^2/2 + |Cy-d|^2/2 + |y-y*|^2/2 + |mu-mu*|^2/2.
double lyapunov(const ProblemInstance& p, const PrimalDualState& s, const KktSolution& kkt) {
  const Eigen::VectorXd g = primal_field(p, s.y, s.mu);
  const Eigen::VectorXd w = dual_field(p.constraints(), s.y);
  return 0.5 * g.squaredNorm() + 0.5 * w.squaredNorm() +
         0.5 * (s.y - kkt.y_star).squaredNorm() + 0.5 * (s.mu - kkt.mu_star).squaredNorm();
}

struct CsvWriters {
  std::ofstream states;
  std::ofstream events;
  std::ofstream metrics;
  int unflushed = 0;

  void maybe_flush() {
    if (++unflushed >= 100) {
      states.flush();
      events.flush();
      metrics.flush();
      unflushed = 0;
    }
  }
};

json params_to_json(const TriggerParams& tp) {
  json j;
  j["kappa"] = tp.kappa;
  j["gamma"] = std::vector<double>(tp.gamma.data(), tp.gamma.data() + tp.gamma.size());
  j["r_min"] = std::vector<double>(tp.r_min.data(), tp.r_min.data() + tp.r_min.size());
  j["bound_lo"] = tp.bound_lo;
  j["bound_hi"] = tp.bound_hi;
  return j;
}

json config_to_json(const RunConfig& c, double dt_used) {
  json j;
  j["mode"] = to_string(c.mode);
  j["plant"] = to_string(c.plant);
  j["dt"] = dt_used;
  j["t_final"] = c.t_final;
  j["eps"] = c.eps;
  j["seed"] = c.seed;
  j["safety"] = c.safety;
  j["scenario"] = c.scenario;
  j["problem_file"] = c.problem_file;
  j["graph_file"] = c.graph_file;
  j["stride"] = c.stride;
  j["apply_schedule"] = c.apply_schedule;
  j["force_broadcast_every_tick"] = c.force_broadcast_every_tick;
  j["alpha"] = c.alpha;
  j["k1"] = c.k1;
  j["k2"] = c.k2;
  if (c.stop_on_primal_error) j["stop_on_primal_error"] = *c.stop_on_primal_error;
  return j;
}

const char* pert_kind_name(PerturbationKind k) {
  switch (k) {
    case PerturbationKind::kLoadChange: return "load-change";
    case PerturbationKind::kCostChange: return "cost-change";
    case PerturbationKind::kBusDisconnect: return "bus-disconnect";
  }
  return "?";
}

json schedule_to_json(const std::vector<Perturbation>& sched) {
  json arr = json::array();
  for (const auto& p : sched) {
    json e;
    e["time"] = p.time;
    e["kind"] = pert_kind_name(p.kind);
    e["areas"] = p.areas;
    e["factors"] = p.factors;
    e["areas_b"] = p.areas_b;
    e["factors_b"] = p.factors_b;
    arr.push_back(e);
  }
  return arr;
}

}  // namespace

Scenario scenario_from_config(const RunConfig& config) {
  if (!config.scenario.empty()) {
    if (config.scenario == "case1") return build_case1(config.seed);
    if (config.scenario == "case2") return build_case2(config.seed);
    throw ConfigError("unknown scenario '" + config.scenario + "' (expected case1 or case2)");
  }
  if (config.problem_file.empty() || config.graph_file.empty()) {
    throw ConfigError("either --scenario or both --problem and --graph are required");
  }
  ProblemInstance problem = load_problem(config.problem_file);
  if (!problem.constraints().normalized &&
      std::abs(spectral_radius_ctc(problem.constraints().C) - 1.0) > 1e-9) {
    throw ConfigError("problem constraints are not normalized; set normalize=true in the file");
  }
  Graph graph = load_graph(config.graph_file);
  const Eigen::Index n = problem.num_agents();
  Scenario s("custom", std::move(problem), std::move(graph), {}, Eigen::VectorXd::Zero(n));
  return s;
}

RunMetrics run(const RunConfig& config, TickObserver* observer) {
  return run_scenario(scenario_from_config(config), config, observer);
}

RunMetrics run_scenario(Scenario scenario, const RunConfig& config, TickObserver* observer) {
  const auto wall_start = std::chrono::steady_clock::now();

  if (!(config.t_final > 0.0)) throw ConfigError("t_final must be positive");
  if (config.dt < 0.0) throw ConfigError("dt must be positive (or 0 for auto)");
  if (config.plant == PlantModel::kUncertain && !(config.eps > 0.0)) {
    throw ConfigError("uncertain plant requires eps > 0");
  }
  if (config.plant == PlantModel::kUncertain && scenario.plants.empty()) {
    throw ConfigError("uncertain plant requires a scenario with plant models");
  }

  const Eigen::Index n = scenario.problem.num_agents();
  const Eigen::Index m = scenario.problem.num_constraints();
  const int total_agents = static_cast<int>(n + m);

  // Curvature bounds agreed by flooding over the base graph, then trigger
  // parameters; continuous mode needs neither.
  Eigen::VectorXd lo(n), hi(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    lo[i] = scenario.problem.objective(i).second_deriv_lo();
    hi[i] = scenario.problem.objective(i).second_deriv_hi();
  }
  const FloodResult flood = flood_bounds(scenario.graph, lo, hi);
  std::optional<TriggerParams> params;
  if (config.mode != Mode::kContinuous) {
    params = select_params(flood.lo, flood.hi, total_agents, config.safety);
  }

  double dt = config.dt;
  if (dt == 0.0) {
    dt = 1e-3;
    if (params) dt = std::min(dt, params->r_min.minCoeff() / 10.0);
  }
  if (config.plant == PlantModel::kUncertain && dt > config.eps / 20.0) {
    std::cerr << "warning: dt = " << dt << " exceeds eps/20 = " << config.eps / 20.0
              << "; the observer (time-scale eps) is under-resolved\n";
  }

  AugmentedNetwork net =
      build_augmented(scenario.graph, scenario.problem.constraints(), scenario.enforce_compatibility);
  SimState state = algorithm1_init(scenario.problem, net, scenario.plants, scenario.x0,
                                   config.eps, config.alpha, config.k1, config.k2);
  KktSolution oracle = kkt_solve(scenario.problem);

  GainMargin margin;
  if (!scenario.plants.empty()) {
    double worst_lp = 0.0, worst_rb = 0.0;
    for (const auto& pl : scenario.plants) {
      worst_lp = std::max(worst_lp, pl.lipschitz_p);
      worst_rb = std::max(worst_rb, pl.rho_b / std::abs(pl.b_known));
    }
    margin = ladrc_gain_margin(worst_lp, worst_rb, 1.0, config.k1, config.k2);
  }

  const long nticks = static_cast<long>(std::llround(config.t_final / dt));
  if (nticks <= 0) throw ConfigError("t_final must exceed dt");
  int stride = config.stride;
  if (stride <= 0) stride = static_cast<int>(std::max<long>(1, nticks / 5000));

  EventLog log(total_agents, config.keep_event_records);

  // Output files.
  CsvWriters csv;
  const bool emit = !config.out_dir.empty();
  std::string manifest_path;
  if (emit) {
    std::filesystem::create_directories(config.out_dir);
    csv.states.open(config.out_dir + "/states.csv");
    csv.events.open(config.out_dir + "/events.csv");
    csv.metrics.open(config.out_dir + "/metrics.csv");
    manifest_path = config.out_dir + "/manifest.json";
    csv.states << "t";
    for (Eigen::Index i = 0; i < n; ++i) csv.states << ",x_" << (i + 1);
    for (Eigen::Index i = 0; i < n; ++i) csv.states << ",y_" << (i + 1);
    for (Eigen::Index l = 0; l < m; ++l) csv.states << ",mu_" << (l + 1);
    for (Eigen::Index i = 0; i < n; ++i) csv.states << ",u_" << (i + 1);
    csv.states << "\n";
    csv.events << "t,agent_id,kind,cause\n";
    csv.metrics << "t,primal_error,tracking_error,lyapunov,events_cum\n";
  }

  auto held_field = primal_field(scenario.problem, state.pd.y_held, state.pd.mu_held);
  auto held_residual = dual_field(scenario.problem.constraints(), state.pd.y_held);

  auto commit = [&](int agent, double now, EventKind kind, EventCause cause) {
    if (agent < n) {
      state.pd.y_held[agent] = state.pd.y[agent];
    } else {
      state.pd.mu_held[agent - n] = state.pd.mu[agent - n];
    }
    state.pd.last_broadcast[agent] = now;
    log.append(EventRecord{now, agent, kind, cause});
    if (emit) {
      csv.events << fmt(now) << "," << (agent + 1) << "," << kind_name(kind) << ","
                 << cause_name(cause) << "\n";
    }
  };

  auto write_state_row = [&](double t) {
    csv.states << fmt(t);
    for (Eigen::Index i = 0; i < n; ++i) csv.states << "," << fmt(state.x[i]);
    for (Eigen::Index i = 0; i < n; ++i) csv.states << "," << fmt(state.pd.y[i]);
    for (Eigen::Index l = 0; l < m; ++l) csv.states << "," << fmt(state.pd.mu[l]);
    for (Eigen::Index i = 0; i < n; ++i) csv.states << "," << fmt(state.u[i]);
    csv.states << "\n";
  };

  RunMetrics metrics;
  metrics.dt_used = dt;
  metrics.params = params;
  metrics.bound_lo = flood.lo;
  metrics.bound_hi = flood.hi;
  metrics.flood_rounds = flood.rounds;
  metrics.gain_margin = margin;

  // Manifest is written up front (configuration and derived quantities) and
  // rewritten with results at the end, so failed runs keep a post-mortem.
  auto write_manifest = [&](const char* status) {
    if (!emit) return;
    json man;
    man["status"] = status;
    man["config"] = config_to_json(config, dt);
    man["scenario_name"] = scenario.name;
    man["n"] = n;
    man["m"] = m;
    man["bounds"] = {{"lo", flood.lo}, {"hi", flood.hi}, {"flood_rounds", flood.rounds}};
    if (params) man["trigger_params"] = params_to_json(*params);
    man["oracle"] = {
        {"y_star", std::vector<double>(oracle.y_star.data(), oracle.y_star.data() + n)},
        {"mu_star", std::vector<double>(oracle.mu_star.data(), oracle.mu_star.data() + m)},
        {"multiplier_unique", oracle.multiplier_unique}};
    man["schedule"] = schedule_to_json(scenario.schedule);
    man["problem"] = json::parse(problem_to_json(scenario.problem));
    json edges = json::array();
    for (auto [i, j] : scenario.graph.edges()) edges.push_back({i + 1, j + 1});
    man["graph"] = {{"n", scenario.graph.n_vertices()}, {"edges", edges}};
    if (!scenario.plants.empty()) {
      man["gain_margin"] = {{"L", margin.L_value},
                            {"satisfied", margin.satisfied},
                            {"defined", margin.defined}};
    }
    man["results"] = {{"ticks", metrics.ticks},
                      {"t_end", metrics.t_end},
                      {"final_primal_error", metrics.final_primal_error},
                      {"final_tracking_error", metrics.final_tracking_error},
                      {"event_count", metrics.event_count},
                      {"min_event_gap_global", metrics.min_event_gap_global},
                      {"max_lyapunov_increase", metrics.max_lyapunov_increase},
                      {"wall_seconds", metrics.wall_seconds}};
    std::ofstream mf(manifest_path);
    mf << man.dump(2) << "\n";
  };
  write_manifest("running");

  // Decentralized trigger pass with same-instant cascade closure: agents are
  // scanned in ascending index until no further agent fires. Proximity sees
  // broadcasts committed earlier in this same instant, which is exactly the
  // synchronizing cascade; committed agents cannot fire twice.
  std::vector<char> fired(static_cast<size_t>(total_agents), 0);
  auto decentralized_pass = [&](double now) {
    std::fill(fired.begin(), fired.end(), 0);
    bool changed = true;
    bool any = false;
    while (changed) {
      changed = false;
      for (int agent = 0; agent < total_agents; ++agent) {
        if (fired[static_cast<size_t>(agent)]) continue;
        std::optional<EventCause> cause;
        if (config.force_broadcast_every_tick) {
          cause = EventCause::kErrorThreshold;
        } else {
          cause = decentralized_should_trigger(agent, scenario.problem, *params, state.pd, net,
                                               held_field, held_residual, now);
        }
        if (!cause) continue;
        const EventKind kind = *cause == EventCause::kProximityRule
                                   ? EventKind::kSyncCascade
                                   : (agent < n ? EventKind::kStateBroadcast
                                                : EventKind::kMultiplierBroadcast);
        commit(agent, now, kind, *cause);
        fired[static_cast<size_t>(agent)] = 1;
        changed = true;
        any = true;
        held_field = primal_field(scenario.problem, state.pd.y_held, state.pd.mu_held);
        held_residual = dual_field(scenario.problem.constraints(), state.pd.y_held);
      }
    }
    return any;
  };

  auto centralized_pass = [&](double now) {
    if (!centralized_should_trigger(scenario.problem, *params, state.pd)) return false;
    for (int agent = 0; agent < total_agents; ++agent) {
      commit(agent, now, EventKind::kSyncCascade, EventCause::kErrorThreshold);
    }
    held_field = primal_field(scenario.problem, state.pd.y_held, state.pd.mu_held);
    held_residual = dual_field(scenario.problem.constraints(), state.pd.y_held);
    return true;
  };

  double v_prev = lyapunov(scenario.problem, state.pd, oracle);
  metrics.lyapunov_trace.emplace_back(0.0, v_prev);
  size_t next_pert = 0;
  if (emit) {
    write_state_row(0.0);
    csv.metrics << fmt(0.0) << "," << fmt((state.pd.y - oracle.y_star).norm()) << ","
                << fmt(0.0) << "," << fmt(v_prev) << ",0\n";
  }

  long tick = 0;
  for (tick = 0; tick < nticks; ++tick) {
    const double t_now = static_cast<double>(tick) * dt;
    const double t_next = static_cast<double>(tick + 1) * dt;

    // (a) triggers at the tick boundary.
    bool any_broadcast = false;
    if (config.mode == Mode::kDecentralized) {
      any_broadcast = decentralized_pass(t_now);
    } else if (config.mode == Mode::kCentralized) {
      any_broadcast = centralized_pass(t_now);
    }
    (void)any_broadcast;

    // (b) advance the optimization layer.
    const Eigen::VectorXd y_tick = state.pd.y;  // references for the ZOH layer
    if (config.mode == Mode::kContinuous) {
      step_continuous(scenario.problem, state.pd, dt);
      held_field = primal_field(scenario.problem, state.pd.y_held, state.pd.mu_held);
      held_residual = dual_field(scenario.problem.constraints(), state.pd.y_held);
    } else {
      state.pd.y += dt * held_field;
      state.pd.mu += dt * held_residual;
      state.pd.t += dt;
      const double norm = std::sqrt(state.pd.y.squaredNorm() + state.pd.mu.squaredNorm());
      if (!std::isfinite(norm) || norm > kDivergenceNorm) {
        metrics.ticks = tick;
        metrics.t_end = t_now;
        write_manifest("diverged");
        throw DivergenceError("primal-dual state diverged at t = " + std::to_string(t_now));
      }
    }

    // (c) physical layer: controller from current estimates, then observer
    // and plant advance over [t, t+dt) with start-of-tick references held.
    if (config.plant == PlantModel::kUncertain) {
      for (Eigen::Index i = 0; i < n; ++i) {
        auto& pl = scenario.plants[static_cast<size_t>(i)];
        auto [obs_next, u] = observer_controller_step(
            state.observers[static_cast<size_t>(i)], pl.p_known, pl.b_known, state.x[i],
            y_tick[i], dt);
        state.observers[static_cast<size_t>(i)] = obs_next;
        state.u[i] = u;
        state.x[i] = plant_step(pl, state.x[i], u, dt);
      }
    } else {
      // Ideal plant: the physical state is the optimization state.
      state.x = state.pd.y;
    }

    // (d) scheduled perturbations snap to the first boundary at/after their
    // time; the window's primal error is sampled against the outgoing oracle.
    while (config.apply_schedule && next_pert < scenario.schedule.size() &&
           scenario.schedule[next_pert].time <= t_next + 1e-12) {
      metrics.window_errors.emplace_back(t_next, (state.pd.y - oracle.y_star).norm());
      apply_perturbation(scenario, scenario.schedule[next_pert]);
      net = build_augmented(scenario.graph, scenario.problem.constraints(),
                            scenario.enforce_compatibility);
      oracle = kkt_solve(scenario.problem);
      held_field = primal_field(scenario.problem, state.pd.y_held, state.pd.mu_held);
      held_residual = dual_field(scenario.problem.constraints(), state.pd.y_held);
      // The oracle jump makes the Lyapunov value jump; restart its tracker.
      v_prev = lyapunov(scenario.problem, state.pd, oracle);
      ++next_pert;
    }

    // (e) metrics and logging at the tick end.
    const double primal_err = (state.pd.y - oracle.y_star).norm();
    const double tracking_err = config.plant == PlantModel::kUncertain
                                    ? (state.x - state.pd.y).cwiseAbs().maxCoeff()
                                    : 0.0;
    const double v_now = lyapunov(scenario.problem, state.pd, oracle);
    metrics.max_lyapunov_increase =
        std::max(metrics.max_lyapunov_increase, (v_now - v_prev) / (1.0 + v_prev));
    const double dist = std::sqrt((state.pd.y - oracle.y_star).squaredNorm() +
                                  (state.pd.mu - oracle.mu_star).squaredNorm());
    if (dist > 1e-3 && v_now >= v_prev) ++metrics.lyapunov_strict_violations;
    v_prev = v_now;

    if ((tick + 1) % stride == 0 || tick + 1 == nticks) {
      metrics.lyapunov_trace.emplace_back(t_next, v_now);
      if (emit) {
        write_state_row(t_next);
        csv.metrics << fmt(t_next) << "," << fmt(primal_err) << "," << fmt(tracking_err) << ","
                    << fmt(v_now) << "," << log.total() << "\n";
        csv.maybe_flush();
      }
    }
    if (observer) observer->on_tick(t_next, state);

    if (config.stop_on_primal_error && primal_err <= *config.stop_on_primal_error) {
      ++tick;
      break;
    }
  }

  metrics.ticks = tick;
  metrics.t_end = static_cast<double>(tick) * dt;
  metrics.final_primal_error = (state.pd.y - oracle.y_star).norm();
  metrics.final_tracking_error = config.plant == PlantModel::kUncertain
                                     ? (state.x - state.pd.y).cwiseAbs().maxCoeff()
                                     : 0.0;
  metrics.window_errors.emplace_back(metrics.t_end, metrics.final_primal_error);
  metrics.event_count = log.total();
  metrics.events_per_agent = log.count_per_agent();
  metrics.events = log.records();
  metrics.min_event_gap_global = log.min_gap_distinct_times();
  metrics.min_event_gap_per_agent = log.min_gap_per_agent();
  metrics.oracle = oracle;
  metrics.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - wall_start).count();
  write_manifest("ok");
  return metrics;
}

CommunicationReport compare_communication(const RunConfig& config_a, const RunConfig& config_b) {
  CommunicationReport rep;
  rep.a = run(config_a);
  rep.b = run(config_b);
  rep.events_a = rep.a.event_count;
  rep.events_b = rep.b.event_count;
  rep.event_ratio = rep.events_b == 0
                        ? std::numeric_limits<double>::infinity()
                        : static_cast<double>(rep.events_a) / static_cast<double>(rep.events_b);
  return rep;
}

}  // namespace etopt
