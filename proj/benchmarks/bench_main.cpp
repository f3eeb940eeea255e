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

#include <benchmark/benchmark.h>

#include "etopt/engine.hpp"
#include "etopt/scenarios.hpp"

namespace {

// Per-tick cost of the decentralized engine at growing network sizes.
void BM_EngineTick(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  auto [problem, graph] = etopt::random_instance(n, 3, 7, {1.0, 3.0});
  etopt::Scenario sc("bench", problem, graph, {}, Eigen::VectorXd::Zero(n));
  etopt::RunConfig cfg;
  cfg.mode = etopt::Mode::kDecentralized;
  cfg.dt = 1e-3;
  cfg.keep_event_records = false;
  for (auto _ : state) {
    cfg.t_final = 0.2;
    auto m = etopt::run_scenario(sc, cfg);
    benchmark::DoNotOptimize(m.final_primal_error);
    state.SetItemsProcessed(state.items_processed() + m.ticks);
  }
}
BENCHMARK(BM_EngineTick)->Arg(10)->Arg(59)->Arg(200)->Unit(benchmark::kMillisecond);

void BM_KktSolve(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  auto [problem, graph] = etopt::random_instance(n, 3, 11, {1.0, 3.0});
  for (auto _ : state) {
    auto kkt = etopt::kkt_solve(problem);
    benchmark::DoNotOptimize(kkt.residual);
  }
}
BENCHMARK(BM_KktSolve)->Arg(10)->Arg(59)->Arg(200);

void BM_TriggerPredicate(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  auto [problem, graph] = etopt::random_instance(n, 3, 13, {1.0, 3.0});
  auto net = etopt::build_augmented(graph, problem.constraints());
  auto params = etopt::select_params(problem.bound_lo(), problem.bound_hi(), net.total());
  auto s = etopt::PrimalDualState::Zero(n, 3);
  s.y.setConstant(0.5);
  const auto g = etopt::primal_field(problem, s.y_held, s.mu_held);
  const auto w = etopt::dual_field(problem.constraints(), s.y_held);
  for (auto _ : state) {
    for (int agent = 0; agent < net.total(); ++agent) {
      auto r = etopt::decentralized_should_trigger(agent, problem, params, s, net, g, w, 1.0);
      benchmark::DoNotOptimize(r);
    }
  }
}
BENCHMARK(BM_TriggerPredicate)->Arg(10)->Arg(59)->Arg(200);

}  // namespace

BENCHMARK_MAIN();
