#include <benchmark/benchmark.h>

#include "rbm3q/simulate.hpp"

using namespace rbm3q;

static const ModelParams kAsym{-1, -2, 1, 2, 0.3, 2, 3};

static void BM_step_rbm(benchmark::State& state) {
  RngStream rng(1, 0);
  Vec2 z{1.0, 1.0};
  const double h = 1e-3;
  for (auto _ : state) {
    const Vec2 xi{rng.normal(), rng.normal()};
    const StepResult r = step_rbm(kAsym, z, xi, h);
    z = r.z;
    benchmark::DoNotOptimize(z);
  }
}
BENCHMARK(BM_step_rbm);

static void BM_simulate_horizon100(benchmark::State& state) {
  SimConfig cfg;
  cfg.h = 1e-3;
  cfg.horizon = 100.0;
  cfg.burn_in = 0.0;
  cfg.replicas = 1;
  for (auto _ : state) {
    double acc = 0;
    simulate_stream(kAsym, cfg, 0, [&](const StepSample& s) { acc += s.dL1; });
    benchmark::DoNotOptimize(acc);
  }
}
BENCHMARK(BM_simulate_horizon100)->Unit(benchmark::kMillisecond);
