#include <benchmark/benchmark.h>

#include <utility>
#include <vector>

#include "bap/deviation_state.h"
#include "bap/generator.h"
#include "bap/heuristics.h"
#include "bap/metrics.h"
#include "bap/random.h"

namespace bap {
namespace {

struct Fixture {
  DaySnapshot day;
  RecipeSiteMatrix prev;
  std::vector<int> positions;
};

Fixture MakeFixture(std::int64_t orders) {
  GeneratorConfig config;
  config.total_orders = orders;
  const DaySnapshot ld12 = GenerateDay(config, -12);
  Fixture f;
  f.day = EvolveDay(ld12, config, -11);
  f.prev = BuildRecipeSiteMatrix(ld12, GreedyConstruct(ld12));
  f.positions = PositionsFromAllocation(f.day, GreedyConstruct(f.day));
  return f;
}

void BM_SwapDelta(benchmark::State& st) {
  const Fixture f = MakeFixture(st.range(0));
  const DeviationState state(f.day, f.prev, f.positions);
  Rng rng(1);
  std::vector<std::pair<int, int>> moves;
  while (moves.size() < 4096) {
    if (auto m = RandomFeasibleSwap(state, rng)) moves.push_back(*m);
  }
  std::size_t k = 0;
  for (auto _ : st) {
    const auto [a, b] = moves[k++ & 4095];
    benchmark::DoNotOptimize(state.SwapDelta(a, b));
  }
}
BENCHMARK(BM_SwapDelta)->Arg(10000)->Arg(50000);

void BM_FullRecompute(benchmark::State& st) {
  const Fixture f = MakeFixture(st.range(0));
  for (auto _ : st) {
    benchmark::DoNotOptimize(
        SiteDeviation(f.prev, BuildRecipeSiteMatrix(f.day, f.positions)));
  }
}
BENCHMARK(BM_FullRecompute)->Arg(10000)->Arg(50000)->Unit(benchmark::kMicrosecond);

void BM_Greedy(benchmark::State& st) {
  const Fixture f = MakeFixture(st.range(0));
  for (auto _ : st) benchmark::DoNotOptimize(GreedyConstruct(f.day));
}
BENCHMARK(BM_Greedy)->Arg(10000)->Arg(50000)->Unit(benchmark::kMillisecond);

void BM_WmapePair(benchmark::State& st) {
  const Fixture f = MakeFixture(10000);
  const RecipeSiteMatrix cur = BuildRecipeSiteMatrix(f.day, f.positions);
  for (auto _ : st) benchmark::DoNotOptimize(ComputeWmapePair(f.prev, cur));
}
BENCHMARK(BM_WmapePair);

}  // namespace
}  // namespace bap

BENCHMARK_MAIN();
