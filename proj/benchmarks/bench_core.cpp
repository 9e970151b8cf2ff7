#include <benchmark/benchmark.h>

#include <vector>

#include "cvqkd/attack.hpp"
#include "cvqkd/estimators.hpp"
#include "cvqkd/protocol.hpp"

namespace {

using namespace cvqkd;

const SplitterModel kMain = SplitterModel::calibrated(1550.0, 0.5);
const SplitterModel kTap = SplitterModel::calibrated(1550.0, 0.9);

void TransmissionEval(benchmark::State& state) {
  double lambda = 1200.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(kMain.transmission(lambda));
    lambda = lambda < 2100.0 ? lambda + 0.37 : 1200.0;
  }
}
BENCHMARK(TransmissionEval);

void WavelengthInversion(benchmark::State& state) {
  double target = 0.05;
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        wavelength_for_transmission(kMain, target, 1, true));
    target = target < 0.95 ? target + 0.07 : 0.05;
  }
}
BENCHMARK(WavelengthInversion);

void SolverBuild(benchmark::State& state) {
  AttackSearchConfig config;
  config.grid_points = static_cast<int>(state.range(0));
  for (auto _ : state) {
    AttackSolver solver(kMain, kTap, 1e8, 1e6, config);
    benchmark::DoNotOptimize(solver.grid().size());
  }
}
BENCHMARK(SolverBuild)->Arg(40)->Arg(80)->Arg(160);

void SolveTarget(benchmark::State& state) {
  const AttackSolver solver(kMain, kTap, 1e8, 1e6);
  ShotRng rng(1, 0);
  for (auto _ : state) {
    const TargetQuadratures target = {2.3 * rng.normal(), 2.3 * rng.normal()};
    benchmark::DoNotOptimize(solver.solve(target).feasible);
  }
}
BENCHMARK(SolveTarget);

void NormalShot(benchmark::State& state) {
  ScenarioConfig config;
  config.shots = 1;
  const ProtocolEngine engine(config);
  std::uint64_t index = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(engine.run_shot(index++).record.bob_x);
  }
}
BENCHMARK(NormalShot);

void AttackShot(benchmark::State& state) {
  ScenarioConfig config;
  config.shots = 1;
  config.attack_enabled = true;
  config.channel_transmission = 0.875;
  const ProtocolEngine engine(config);
  std::uint64_t index = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(engine.run_shot(index++).record.bob_x);
  }
}
BENCHMARK(AttackShot);

void ConditionalVarianceEstimation(benchmark::State& state) {
  ScenarioConfig config;
  config.shots = state.range(0);
  const ProtocolEngine engine(config);
  const auto outcomes = engine.run_all();
  std::vector<ShotRecord> records;
  records.reserve(outcomes.size());
  for (const auto& outcome : outcomes) records.push_back(outcome.record);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        estimate_conditional_variances(records).v_ab.value);
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(ConditionalVarianceEstimation)
    ->Arg(10000)
    ->Arg(100000)
    ->Complexity();

}  // namespace

BENCHMARK_MAIN();
