// Serial reference kernels against their OpenMP counterparts on the case-study configuration.
#include <benchmark/benchmark.h>

#include "lifecycle/calibration.hpp"
#include "lifecycle/config.hpp"
#include "lifecycle/merge.hpp"
#include "lifecycle/simulation.hpp"

using namespace lifecycle;

namespace {

const RunConfig& config() {
  static const RunConfig cfg = load_config(LIFECYCLE_CASE_CONFIG);
  return cfg;
}

const MergedPolicy& policy() {
  static const MergedPolicy pol = solve_split(config().problem(), config().v0);
  return pol;
}

void BM_ExpectedCurvesParallel(benchmark::State& state) {
  const auto grid = uniform_grid(40.0, 2080);
  for (auto _ : state) benchmark::DoNotOptimize(expected_curves(policy(), grid));
}

void BM_ExpectedCurvesSerial(benchmark::State& state) {
  const auto grid = uniform_grid(40.0, 2080);
  for (auto _ : state) benchmark::DoNotOptimize(reference::expected_curves(policy(), grid));
}

void BM_ResidualsParallel(benchmark::State& state) {
  const auto target = target_curves_paper();
  const ResidualEvaluator ev(config().calibration_setup(), ModelVariant::Full, target);
  const auto p = published_params(ModelVariant::Full);
  for (auto _ : state) benchmark::DoNotOptimize(ev(p));
}

void BM_ResidualsSerial(benchmark::State& state) {
  const auto target = target_curves_paper();
  const auto setup = config().calibration_setup();
  const auto p = published_params(ModelVariant::Full);
  for (auto _ : state) benchmark::DoNotOptimize(reference::residuals(ModelVariant::Full, p, target, setup));
}

void BM_BudgetCheckParallel(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(budget_check(policy(), 520, static_cast<int>(state.range(0)), 1));
}

void BM_BudgetCheckSerial(benchmark::State& state) {
  for (auto _ : state)
    benchmark::DoNotOptimize(reference::budget_check(policy(), 520, static_cast<int>(state.range(0)), 1));
}

void BM_FloorScanParallel(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(floor_scan(policy(), 520, static_cast<int>(state.range(0)), 1));
}

void BM_FloorScanSerial(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(reference::floor_scan(policy(), 520, static_cast<int>(state.range(0)), 1));
}

}  // namespace

BENCHMARK(BM_ExpectedCurvesParallel)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ExpectedCurvesSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ResidualsParallel)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ResidualsSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_BudgetCheckParallel)->Arg(200)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_BudgetCheckSerial)->Arg(200)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_FloorScanParallel)->Arg(200)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_FloorScanSerial)->Arg(200)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
