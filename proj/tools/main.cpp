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
// Command line front end.
//
//   etopt run    --scenario case1|case2 | --problem f --graph g  [options]
//   etopt sweep  --eps 0.05,0.01,0.005  [run options]
//   etopt oracle --problem f
//
// Exit codes: 0 success, 2 configuration error, 3 divergence, 4 scenario
// error.

#include <CLI11.hpp>
#include <cstdio>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "etopt/engine.hpp"
#include "etopt/io.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitDivergence = 3;
constexpr int kExitScenario = 4;

etopt::Mode parse_mode(const std::string& s) {
  if (s == "continuous") return etopt::Mode::kContinuous;
  if (s == "centralized") return etopt::Mode::kCentralized;
  if (s == "decentralized") return etopt::Mode::kDecentralized;
  throw etopt::ConfigError("unknown mode '" + s + "'");
}

etopt::PlantModel parse_plant(const std::string& s) {
  if (s == "ideal") return etopt::PlantModel::kIdeal;
  if (s == "uncertain") return etopt::PlantModel::kUncertain;
  throw etopt::ConfigError("unknown plant model '" + s + "'");
}

void add_run_options(CLI::App* cmd, etopt::RunConfig& cfg, std::string& mode,
                     std::string& plant) {
  cmd->add_option("--scenario", cfg.scenario, "case1 or case2");
  cmd->add_option("--problem", cfg.problem_file, "problem document (JSON)");
  cmd->add_option("--graph", cfg.graph_file, "edge-list graph file");
  cmd->add_option("--mode", mode, "continuous | centralized | decentralized")
      ->default_val("decentralized");
  cmd->add_option("--plant", plant, "ideal | uncertain")->default_val("ideal");
  cmd->add_option("--dt", cfg.dt, "step size (0 = auto)");
  cmd->add_option("--t-final", cfg.t_final, "simulation horizon");
  cmd->add_option("--eps", cfg.eps, "observer time-scale (uncertain plant)");
  cmd->add_option("--seed", cfg.seed, "scenario / uncertainty seed");
  cmd->add_option("--safety", cfg.safety, "trigger parameter safety factor in (0,1)");
  cmd->add_option("--out", cfg.out_dir, "output directory (states/events/metrics/manifest)");
  cmd->add_option("--stride", cfg.stride, "trajectory downsampling stride (0 = auto)");
  cmd->add_flag("--no-schedule", [&cfg](int64_t) { cfg.apply_schedule = false; },
                "skip scenario perturbation schedules");
}

void print_summary(const etopt::RunMetrics& m) {
  std::printf("ticks            %ld (t_end %.6g, dt %.6g)\n", m.ticks, m.t_end, m.dt_used);
  std::printf("primal error     %.6e\n", m.final_primal_error);
  std::printf("tracking error   %.6e\n", m.final_tracking_error);
  std::printf("events           %ld (min distinct-instant gap %.6e)\n", m.event_count,
              m.min_event_gap_global);
  std::printf("lyapunov max inc %.3e\n", m.max_lyapunov_increase);
  std::printf("wall time        %.3f s\n", m.wall_seconds);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"event-triggered distributed optimization simulator"};
  app.require_subcommand(1);

  etopt::RunConfig cfg;
  std::string mode_str = "decentralized", plant_str = "ideal";
  std::string eps_list = "0.05,0.01,0.005";
  std::string oracle_problem;

  CLI::App* run_cmd = app.add_subcommand("run", "simulate one configuration");
  add_run_options(run_cmd, cfg, mode_str, plant_str);

  CLI::App* sweep_cmd = app.add_subcommand("sweep", "run once per eps value");
  add_run_options(sweep_cmd, cfg, mode_str, plant_str);
  sweep_cmd->add_option("--eps-list,--eps", eps_list, "comma-separated eps values")
      ->default_val("0.05,0.01,0.005");

  CLI::App* oracle_cmd = app.add_subcommand("oracle", "print the KKT solution of a problem file");
  oracle_cmd->add_option("--problem", oracle_problem, "problem document (JSON)")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (oracle_cmd->parsed()) {
      etopt::ProblemInstance p = etopt::load_problem(oracle_problem);
      etopt::KktSolution kkt = etopt::kkt_solve(p);
      std::printf("y_star:");
      for (Eigen::Index i = 0; i < kkt.y_star.size(); ++i) std::printf(" %.12g", kkt.y_star[i]);
      std::printf("\nmu_star:");
      for (Eigen::Index i = 0; i < kkt.mu_star.size(); ++i) std::printf(" %.12g", kkt.mu_star[i]);
      std::printf("\nmultiplier_unique: %s\nresidual: %.3e\n",
                  kkt.multiplier_unique ? "true" : "false", kkt.residual);
      return kExitOk;
    }

    cfg.mode = parse_mode(mode_str);
    cfg.plant = parse_plant(plant_str);

    if (run_cmd->parsed()) {
      etopt::RunMetrics m = etopt::run(cfg);
      print_summary(m);
      return kExitOk;
    }

    if (sweep_cmd->parsed()) {
      std::vector<double> eps_values;
      std::stringstream ss(eps_list);
      std::string tok;
      while (std::getline(ss, tok, ',')) {
        if (!tok.empty()) eps_values.push_back(std::stod(tok));
      }
      if (eps_values.empty()) throw etopt::ConfigError("sweep needs at least one eps value");
      const std::string base_out = cfg.out_dir;
      for (double e : eps_values) {
        etopt::RunConfig c = cfg;
        c.eps = e;
        if (!base_out.empty()) {
          std::ostringstream dir;
          dir << base_out << "/eps_" << e;
          c.out_dir = dir.str();
        }
        std::printf("--- eps = %g ---\n", e);
        etopt::RunMetrics m = etopt::run(c);
        print_summary(m);
      }
      return kExitOk;
    }
  } catch (const etopt::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const etopt::InvalidProblemError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const etopt::DivergenceError& e) {
    std::cerr << "divergence: " << e.what() << "\n";
    return kExitDivergence;
  } catch (const etopt::ScenarioError& e) {
    std::cerr << "scenario error: " << e.what() << "\n";
    return kExitScenario;
  } catch (const etopt::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  }
  return kExitOk;
}
