#include <benchmark/benchmark.h>

#include "rbm3q/bvp.hpp"

using namespace rbm3q;

static const ModelParams kAsym{-1, -2, 1, 2, 0.3, 2, 3};
static const ModelParams kSym{-1, -1, 1, 1, 0.0, 2, 2};

static void BM_g_matrix(benchmark::State& state) {
  for (auto _ : state) {
    auto g = g_matrix(kAsym, -2.5);
    benchmark::DoNotOptimize(g);
  }
}
BENCHMARK(BM_g_matrix);

static void BM_conformal_map(benchmark::State& state) {
  const ConformalMap cm(hyperbola(kSym, KernelId::Sym, BranchVar::PoverQ));
  Complex p(-0.5, 0.4);
  for (auto _ : state) {
    auto z = cm.map(p);
    benchmark::DoNotOptimize(z);
  }
}
BENCHMARK(BM_conformal_map);

static void BM_fredholm_solve(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  for (auto _ : state) {
    auto r = fredholm_solve(kSym, {Complex(0.1), Complex(0.1)}, n);
    benchmark::DoNotOptimize(r.residual_norm);
  }
}
BENCHMARK(BM_fredholm_solve)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);
