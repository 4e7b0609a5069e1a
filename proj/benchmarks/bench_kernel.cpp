#include <benchmark/benchmark.h>

#include "rbm3q/kernel.hpp"

using namespace rbm3q;

static const ModelParams kAsym{-1, -2, 1, 2, 0.3, 2, 3};

static void BM_branch_eval(benchmark::State& state) {
  Complex q(0.3, 0.7);
  for (auto _ : state) {
    auto v = branch_eval(kAsym, KernelId::U, BranchVar::PoverQ, 1, q);
    benchmark::DoNotOptimize(v);
  }
}
BENCHMARK(BM_branch_eval);

static void BM_branch_eval_cut(benchmark::State& state) {
  for (auto _ : state) {
    auto v = branch_eval_cut(kAsym, KernelId::U, BranchVar::PoverQ, 1, -2.5,
                             CutSide::Below);
    benchmark::DoNotOptimize(v);
  }
}
BENCHMARK(BM_branch_eval_cut);

static void BM_kernel_eval(benchmark::State& state) {
  Complex p(0.3, 0.7), q(-1.0, 0.2);
  for (auto _ : state) {
    auto v = kernel_UV(kAsym, KernelId::U, p, q);
    benchmark::DoNotOptimize(v);
  }
}
BENCHMARK(BM_kernel_eval);
