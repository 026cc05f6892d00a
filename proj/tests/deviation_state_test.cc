#include <random>

#include <gtest/gtest.h>

#include "bap/deviation_state.h"
#include "bap/generator.h"
#include "bap/heuristics.h"
#include "test_util.h"

namespace bap {
namespace {

struct Fixture {
  DaySnapshot day;
  RecipeSiteMatrix prev;
  std::vector<int> positions;
};

Fixture BenchmarkLike(std::int64_t orders, std::uint64_t seed) {
  GeneratorConfig config;
  config.total_orders = orders;
  config.seed = seed;
  const DaySnapshot ld12 = GenerateDay(config, -12);
  Fixture f;
  f.day = EvolveDay(ld12, config, -11);
  f.prev = BuildRecipeSiteMatrix(ld12, GreedyConstruct(ld12));
  f.positions = PositionsFromAllocation(f.day, GreedyConstruct(f.day));
  return f;
}

std::int64_t FullAbsSum(const DaySnapshot& day, const RecipeSiteMatrix& prev,
                        const std::vector<int>& positions) {
  return testing::NaiveSiteGlobal(prev, BuildRecipeSiteMatrix(day, positions))
      .first;
}

TEST(DeviationState, InitialSumsMatchRecount) {
  const Fixture f = BenchmarkLike(2000, 3);
  const DeviationState state(f.day, f.prev, f.positions);
  const auto [site, global] =
      testing::NaiveSiteGlobal(f.prev, BuildRecipeSiteMatrix(f.day, f.positions));
  EXPECT_EQ(state.abs_sum(), site);
  EXPECT_EQ(state.global_abs_sum(), global);
  EXPECT_EQ(state.denom(), TotalRecipeUnits(f.day));
}

TEST(DeviationState, TenThousandDeltasMatchFullRecompute) {
  const Fixture f = BenchmarkLike(1000, 7);
  DeviationState state(f.day, f.prev, f.positions);
  std::vector<int> positions = f.positions;
  Rng rng(42);
  int checked = 0;
  while (checked < 10000) {
    const auto move = RandomFeasibleSwap(state, rng);
    ASSERT_TRUE(move.has_value());
    const auto [a, b] = *move;
    const std::int64_t before = FullAbsSum(f.day, f.prev, positions);
    const std::int64_t delta = state.SwapDelta(a, b);
    std::swap(positions[a], positions[b]);
    const std::int64_t after = FullAbsSum(f.day, f.prev, positions);
    ASSERT_EQ(delta, after - before) << "move " << checked;
    const Ratio rational =
        SwapDelta(state, {state.id_of(a), state.id_of(b)});
    ASSERT_EQ(rational, Ratio(after - before, state.denom()));
    state.ApplySwap(a, b);
    ASSERT_EQ(state.abs_sum(), after);
    ++checked;
  }
  EXPECT_EQ(state.Current(), BuildRecipeSiteMatrix(f.day, positions));
}

TEST(DeviationState, IdenticalRecipeSwapIsZero) {
  const DaySnapshot day = testing::MakeDay(-11, 5, {1, 1}, EligibilityTable(5, 3),
                                           {{1, {1, 2}}, {2, {2, 1}}, {3, {3}}});
  RecipeSiteMatrix prev(5, 3);
  prev.cell(0, 2) = 4;
  const std::vector<int> pos = {0, 1, 2};
  const DeviationState state(day, prev, pos);
  EXPECT_EQ(state.SwapDelta(0, 1), 0);
  EXPECT_EQ(SwapDelta(state, {1, 2}), Ratio(0));
}

TEST(DeviationState, ReturningMoveNegatesDelta) {
  const Fixture f = BenchmarkLike(500, 11);
  DeviationState state(f.day, f.prev, f.positions);
  Rng rng(5);
  for (int t = 0; t < 500; ++t) {
    const auto move = RandomFeasibleSwap(state, rng);
    ASSERT_TRUE(move.has_value());
    const auto [a, b] = *move;
    const std::int64_t forward = state.SwapDelta(a, b);
    state.ApplySwap(a, b);
    EXPECT_EQ(state.SwapDelta(a, b), -forward);
    state.ApplySwap(a, b);
  }
}

TEST(DeviationState, MoveDeltaMatchesRecount) {
  const Fixture f = BenchmarkLike(300, 2);
  DeviationState state(f.day, f.prev, f.positions);
  std::vector<int> positions = f.positions;
  std::mt19937_64 rng(1);
  for (int t = 0; t < 300; ++t) {
    const int a = static_cast<int>(rng() % positions.size());
    const int to = static_cast<int>(rng() % 3);
    if (to == positions[a] || !state.eligible(a).ContainsIndex(to)) continue;
    const std::int64_t before = FullAbsSum(f.day, f.prev, positions);
    std::vector<int> moved = positions;
    moved[a] = to;
    // Capacities are ignored by the recount as well.
    const std::int64_t after =
        testing::NaiveSiteGlobal(f.prev, BuildRecipeSiteMatrix(f.day, moved))
            .first;
    EXPECT_EQ(state.MoveDelta(a, to), after - before);
  }
}

TEST(DeviationState, SwapDeltaRejectsBadMoves) {
  const DaySnapshot day = testing::TenOrderDay12();
  const std::vector<int> pos =
      PositionsFromAllocation(day, testing::TenOrderSolution12());
  const DeviationState state(day, RecipeSiteMatrix(100, 3), pos);
  EXPECT_THROW(SwapDelta(state, {1, 999}), InvalidInstance);
  // Order 9 is F3-only, order 2 sits at F1.
  EXPECT_THROW(SwapDelta(state, {9, 2}), InvalidInstance);
  // Same factory.
  EXPECT_THROW(SwapDelta(state, {2, 3}), InvalidInstance);
}

TEST(DeviationState, MixedCellsEmptyIffSiteEqualsGlobal) {
  std::mt19937_64 rng(31);
  for (int t = 0; t < 300; ++t) {
    const testing::SmallCase c = testing::RandomSmallCase(rng, 10, 6);
    const std::vector<int> pos = PositionsFromAllocation(c.day, c.base);
    const DeviationState state(c.day, c.prev, pos);
    EXPECT_EQ(MixedPositiveCells(state).empty(),
              state.abs_sum() == state.global_abs_sum());
  }
}

}  // namespace
}  // namespace bap
