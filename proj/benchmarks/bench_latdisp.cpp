#include <benchmark/benchmark.h>

#include <cmath>

#include "latdisp/continuum_limit.hpp"
#include "latdisp/lattice.hpp"
#include "latdisp/littlewood_paley.hpp"
#include "latdisp/oscillatory.hpp"
#include "latdisp/random.hpp"
#include "latdisp/solvers.hpp"
#include "latdisp/strichartz.hpp"

using namespace latdisp;

namespace {

ComplexField field(int m) {
  SplitMix64 rng(1);
  return random_mean_zero_field(LatticeGrid(2, m, 1.0), rng);
}

void BM_DftRoundTrip(benchmark::State& state) {
  const auto f = field(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(idft(dft(f)));
}
BENCHMARK(BM_DftRoundTrip)->RangeMultiplier(4)->Range(64, 1024)->Unit(benchmark::kMillisecond);

void BM_LinearPropagate(benchmark::State& state) {
  const auto f = field(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(linear_propagate(f, 0.5, FlowKind::discrete));
}
BENCHMARK(BM_LinearPropagate)->RangeMultiplier(4)->Range(64, 1024)->Unit(benchmark::kMillisecond);

void BM_StrangSteps(benchmark::State& state) {
  const int m = static_cast<int>(state.range(0));
  const LatticeGrid g(2, m, 24.0 / m);
  const auto f = discretize(make_gaussian(24.0, {12.0, 12.0}, 2.0), g);
  for (auto _ : state) benchmark::DoNotOptimize(solve_final(f, 0.025, 2.5e-4, {1.0, 3.0}, FlowKind::discrete));
  state.SetItemsProcessed(state.iterations() * 100);
}
BENCHMARK(BM_StrangSteps)->Arg(64)->Arg(256)->Unit(benchmark::kMillisecond);

void BM_KernelTransform(benchmark::State& state) {
  const int m = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(eval_K_unit(DyadicScale(3), 10.0, m));
}
BENCHMARK(BM_KernelTransform)->Arg(512)->Arg(2048)->Unit(benchmark::kMillisecond);

void BM_KernelWindow(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(eval_K_window(DyadicScale(2), 200.0, {1500.0, 0.0}, 2));
}
BENCHMARK(BM_KernelWindow)->Unit(benchmark::kMillisecond);

void BM_SquareFunction(benchmark::State& state) {
  const auto f = field(static_cast<int>(state.range(0)));
  const auto scales = covering_scales(f.grid());
  for (auto _ : state) benchmark::DoNotOptimize(square_function_norm(f, 4.0, scales));
}
BENCHMARK(BM_SquareFunction)->Arg(64)->Arg(256)->Unit(benchmark::kMillisecond);

void BM_StrichartzSweep(benchmark::State& state) {
  const auto profile = make_gaussian(32.0, {16.0, 16.0}, 2.0);
  const std::vector<StrichartzTarget> targets = {
      {{Exponent::ratio(8), Exponent::ratio(4)}, false}};
  StrichartzOptions opt;
  opt.samples = 64;
  opt.doubled_horizon = false;
  for (auto _ : state) benchmark::DoNotOptimize(strichartz_sweep(profile, targets, {1.0, 0.5}, 10.0, opt));
}
BENCHMARK(BM_StrichartzSweep)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
