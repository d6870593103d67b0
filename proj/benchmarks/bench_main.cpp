#include <benchmark/benchmark.h>

#include "lostsales/demand.hpp"
#include "lostsales/dp.hpp"
#include "lostsales/lindley.hpp"
#include "lostsales/rng.hpp"

using namespace lostsales;

namespace {

DemandDistribution two_point() { return DemandDistribution::from_pmf({0, 2}, {0.5, 0.5}); }

void BM_DpSolve(benchmark::State& state) {
  const auto d = truncate_geometric(0.5, 1e-6);
  DPConfig cfg;
  cfg.L = state.range(0);
  cfg.T = 3 * cfg.L;
  for (auto _ : state) benchmark::DoNotOptimize(solve(d, 4, 1, cfg).opt);
}
BENCHMARK(BM_DpSolve)->Arg(1)->Arg(2)->Arg(3)->Unit(benchmark::kMillisecond);

void BM_StationaryWaiting(benchmark::State& state) {
  const auto d = truncate_geometric(0.5, 1e-6);
  for (auto _ : state) benchmark::DoNotOptimize(stationary_waiting(d, 0.5).mean);
}
BENCHMARK(BM_StationaryWaiting)->Unit(benchmark::kMicrosecond);

void BM_ArgmaxMonteCarlo(benchmark::State& state) {
  const auto d = two_point();
  auto s = rng::Stream::child(1, "bench.argmax", 0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(argmax_distribution_mc(d, 0.5, 1e-6, state.range(0), s));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_ArgmaxMonteCarlo)->Arg(10'000)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
