#include <benchmark/benchmark.h>

#include "nomamec/bounds.hpp"
#include "nomamec/channel.hpp"
#include "nomamec/interior_point.hpp"
#include "nomamec/sca.hpp"
#include "nomamec/subproblem.hpp"

namespace {

using namespace nomamec;

Scenario paper_scenario(std::size_t users) {
  ChannelConfig config;
  config.E_th = 15.0;
  config.P_t_db = 12.0;
  config.seed = 7;
  return draw_scenario(config, users, 0);
}

void BM_RateLowerBound(benchmark::State& state) {
  double x = 1.3, u = 0.7, v = 2.1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(rate_lower_bound(x, u, v, 1.0, 0.5, 2.0));
    x += 1e-12;
  }
}
BENCHMARK(BM_RateLowerBound);

void BM_BuildNomaSubproblem(benchmark::State& state) {
  const Scenario s = paper_scenario(static_cast<std::size_t>(state.range(0)));
  const ExpansionPoint point = ExpansionPoint::from(start_point(s, StartPoint::kDeadlineGaps));
  for (auto _ : state) benchmark::DoNotOptimize(build_noma_subproblem(s, point));
}
BENCHMARK(BM_BuildNomaSubproblem)->DenseRange(2, 6, 2);

void BM_SolveNomaSubproblem(benchmark::State& state) {
  const Scenario s = paper_scenario(static_cast<std::size_t>(state.range(0)));
  const NomaSubproblem sub = build_noma_subproblem(s, ExpansionPoint::from(start_point(s, StartPoint::kDeadlineGaps)));
  InteriorPointBackend backend;
  for (auto _ : state) benchmark::DoNotOptimize(backend.solve(sub.problem));
}
BENCHMARK(BM_SolveNomaSubproblem)->DenseRange(2, 6, 2)->Unit(benchmark::kMillisecond);

void BM_SolveNoma(benchmark::State& state) {
  const Scenario s = paper_scenario(static_cast<std::size_t>(state.range(0)));
  ScaSettings settings;
  settings.keep_history = false;
  for (auto _ : state) benchmark::DoNotOptimize(solve_noma(s, settings));
}
BENCHMARK(BM_SolveNoma)->DenseRange(2, 4, 1)->Unit(benchmark::kMillisecond);

void BM_SolveOma(benchmark::State& state) {
  const Scenario s = paper_scenario(static_cast<std::size_t>(state.range(0)));
  ScaSettings settings;
  settings.keep_history = false;
  for (auto _ : state) benchmark::DoNotOptimize(solve_oma(s, settings));
}
BENCHMARK(BM_SolveOma)->DenseRange(2, 4, 1)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
