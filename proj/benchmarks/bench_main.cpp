#include <benchmark/benchmark.h>

#include "ecosched/engine.hpp"
#include "ecosched/generator.hpp"
#include "ecosched/oracle.hpp"
#include "ecosched/perf_model.hpp"
#include "ecosched/policy.hpp"
#include "ecosched/workload.hpp"

using namespace ecosched;

namespace {

const WorkloadSpec& case_study() {
  static const WorkloadSpec spec = load_workload(std::string(ECOSCHED_FIXTURE_DIR) + "/case_study.json");
  return spec;
}

void BM_SelectAction(benchmark::State& state) {
  RandomWorkloadParams p;
  p.min_apps = p.max_apps = static_cast<int>(state.range(0));
  p.total_gpus = 8;
  p.numa_domains = 4;
  p.max_modes = 4;
  const auto spec = random_workload(42, p);
  const PolicyConfig cfg;
  const auto estimates = estimate_window(spec, cfg);
  const NodeSimulator sim(spec, false);
  const auto view = sim.view(&estimates);
  for (auto _ : state) benchmark::DoNotOptimize(select_action(view, cfg));
}
BENCHMARK(BM_SelectAction)->Arg(4)->Arg(8)->Arg(12);

void BM_SimulateCaseStudy(benchmark::State& state) {
  PolicyConfig cfg;
  cfg.kind = static_cast<PolicyKind>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(simulate(case_study(), cfg));
  state.SetLabel(std::string(to_string(cfg.kind)));
}
BENCHMARK(BM_SimulateCaseStudy)
    ->Arg(static_cast<int>(PolicyKind::kEcoSched))
    ->Arg(static_cast<int>(PolicyKind::kMarbleLike))
    ->Arg(static_cast<int>(PolicyKind::kSequentialMaxGpu));

void BM_OracleSolve(benchmark::State& state) {
  RandomWorkloadParams p;
  p.min_apps = p.max_apps = static_cast<int>(state.range(0));
  p.max_modes = 3;
  p.interference = true;
  const auto spec = random_workload(7, p);
  for (auto _ : state) benchmark::DoNotOptimize(solve(spec));
}
BENCHMARK(BM_OracleSolve)->Arg(4)->Arg(6)->Unit(benchmark::kMillisecond);

void BM_OracleCaseStudy(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(solve(case_study()));
}
BENCHMARK(BM_OracleCaseStudy)->Unit(benchmark::kMillisecond)->Iterations(3);

}  // namespace

BENCHMARK_MAIN();
