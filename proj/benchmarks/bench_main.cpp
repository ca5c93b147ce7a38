// Microbenchmarks: event throughput of the exact simulator at several network
// sizes, the event-selection step in isolation, and the stationary solver.
#include <benchmark/benchmark.h>

#include "plastnet/fast.hpp"
#include "plastnet/rng.hpp"
#include "plastnet/sim.hpp"
#include "plastnet/sum_tree.hpp"

namespace {

using namespace plastnet;

SimConfig bench_sim_config(SimMode mode) {
  SimConfig cfg;
  cfg.seed = 7;
  cfg.mode = mode;
  cfg.max_events = UINT64_MAX - 1;
  cfg.audit_interval = UINT64_MAX; // audits are not part of the hot path
  return cfg;
}

void bm_step_frozen(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  Simulator sim(NeuronParams{}, PlasticityParams{}, WeightMatrix::uniform(n, 1),
                bench_sim_config(SimMode::frozen_silent));
  for (auto _ : state) benchmark::DoNotOptimize(sim.step());
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(bm_step_frozen)->Arg(10)->Arg(100)->Arg(1000);

void bm_step_plastic(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  Simulator sim(NeuronParams{}, PlasticityParams{}, WeightMatrix::uniform(n, 1),
                bench_sim_config(SimMode::plastic));
  for (auto _ : state) benchmark::DoNotOptimize(sim.step());
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(bm_step_plastic)->Arg(10)->Arg(100)->Arg(1000);

// Rate-proportional selection alone: one tree descent per iteration.
void bm_tree_sample(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  SumTree tree(static_cast<std::size_t>(n));
  std::vector<double> rates(static_cast<std::size_t>(n));
  Xoshiro256pp rng(11);
  for (std::size_t i = 0; i < rates.size(); ++i) rates[i] = 0.01 + rng.uniform01();
  tree.rebuild(rates.data());
  for (auto _ : state)
    benchmark::DoNotOptimize(tree.sample(rng.uniform01() * tree.total()));
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(bm_tree_sample)->Arg(100)->Arg(1000)->Arg(10000);

void bm_stationary_solve(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  NeuronParams np;
  PlasticityParams pp;
  Xoshiro256pp rng(3);
  for (auto _ : state) {
    state.PauseTiming();
    WeightMatrix w = WeightMatrix::uniform(n, 1);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (i != j)
          w.set_k(i, j, 1 + static_cast<std::int32_t>(rng.next() % 40));
    FastAnalytics fa(np, pp);
    state.ResumeTiming();
    benchmark::DoNotOptimize(fa.mu(w));
  }
}
BENCHMARK(bm_stationary_solve)->Arg(4)->Arg(6)->Arg(8);

} // namespace

BENCHMARK_MAIN();
