#include <benchmark/benchmark.h>

#include "mergecoord/scenario.hpp"
#include "mergecoord/sim.hpp"

using namespace mergecoord;

static void BM_ConflictPresetRun(benchmark::State& state) {
  const ScenarioConfig cfg = preset("conflict_sync");
  const Scenario scenario = build_scenario(cfg);
  for (auto _ : state) {
    benchmark::DoNotOptimize(run(scenario));
  }
}
BENCHMARK(BM_ConflictPresetRun)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
