#include <benchmark/benchmark.h>

#include <vector>

#include "tropical/equil.hpp"
#include "tropical/tyson.hpp"

namespace {

using namespace tropical;

// Branch solving over the full Tyson enumeration, serial against OpenMP.
void BM_Equilibrate(benchmark::State& state) {
  const auto sys = tyson::build(tyson::Params{});
  EquilibrationOptions opts;
  opts.parallel = state.range(0) != 0;
  for (auto _ : state) benchmark::DoNotOptimize(all_equilibrations(sys, opts));
}
BENCHMARK(BM_Equilibrate)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_HybridCycleSweep(benchmark::State& state) {
  const tyson::Params p;
  const std::vector<double> eps{0.3, 0.2, 0.15, 0.1};
  const bool parallel = state.range(0) != 0;
  for (auto _ : state) {
    std::vector<double> periods(eps.size());
#pragma omp parallel for if (parallel)
    for (long k = 0; k < static_cast<long>(eps.size()); ++k) {
      const auto hc = tyson::hybrid_cycle(p, eps[static_cast<std::size_t>(k)]);
      periods[static_cast<std::size_t>(k)] = hc.durations[0] + hc.durations[1] + hc.durations[2];
    }
    benchmark::DoNotOptimize(periods);
  }
}
BENCHMARK(BM_HybridCycleSweep)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
