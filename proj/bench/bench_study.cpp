// Serial reference vs OpenMP study kernel on the same configuration.

#include <benchmark/benchmark.h>
#include <omp.h>

#include "gammaent/simlab.hpp"

namespace {

gammaent::simlab::StudyConfig bench_config(int replicates) {
  gammaent::simlab::StudyConfig cfg;
  cfg.sample_sizes = {20};
  cfg.replicates = replicates;
  cfg.master_seed = 1;
  return cfg;
}

void BM_StudySerial(benchmark::State& state) {
  const auto cfg = bench_config(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(gammaent::simlab::run_study_serial(cfg));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_StudyParallel(benchmark::State& state) {
  const auto cfg = bench_config(static_cast<int>(state.range(0)));
  omp_set_num_threads(static_cast<int>(state.range(1)));
  for (auto _ : state) benchmark::DoNotOptimize(gammaent::simlab::run_study(cfg));
  state.SetItemsProcessed(state.iterations() * state.range(0));
  state.counters["threads"] = static_cast<double>(state.range(1));
}

}  // namespace

BENCHMARK(BM_StudySerial)->Arg(64)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_StudyParallel)
    ->ArgsProduct({{64}, {1, 2, 4, 8}})
    ->Unit(benchmark::kMillisecond)
    ->UseRealTime();

BENCHMARK_MAIN();
