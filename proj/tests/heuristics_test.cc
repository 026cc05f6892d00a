#include <algorithm>
#include <random>
#include <set>

#include <gtest/gtest.h>

#include "bap/exact.h"
#include "bap/generator.h"
#include "bap/heuristics.h"
#include "test_util.h"

namespace bap {
namespace {

std::set<OrderId> At(const Allocation& a, int factory) {
  std::set<OrderId> out;
  for (const auto& [id, f] : a.assignments) {
    if (f.value == factory) out.insert(id);
  }
  return out;
}

struct Pair {
  DaySnapshot day;
  RecipeSiteMatrix prev;
};

Pair GeneratedPair(std::int64_t orders, std::uint64_t seed) {
  GeneratorConfig config;
  config.total_orders = orders;
  config.seed = seed;
  const DaySnapshot ld12 = GenerateDay(config, -12);
  return {EvolveDay(ld12, config, -11),
          BuildRecipeSiteMatrix(ld12, GreedyConstruct(ld12))};
}

bool NonIncreasing(const std::vector<std::int64_t>& v) {
  return std::is_sorted(v.rbegin(), v.rend());
}

TEST(Greedy, TenOrderExample) {
  const Allocation a = GreedyConstruct(testing::TenOrderDay12());
  EXPECT_EQ(At(a, 1), (std::set<OrderId>{2, 3}));
  const std::set<OrderId> f2 = At(a, 2);
  EXPECT_EQ(f2.size(), 5u);
  EXPECT_TRUE(f2.count(1));
  EXPECT_TRUE(f2.count(4));
  for (OrderId id : f2) EXPECT_TRUE(id >= 1 && id <= 8);
  EXPECT_TRUE(At(a, 3).count(9));
  EXPECT_TRUE(At(a, 3).count(10));
  EXPECT_TRUE(ValidateAllocation(testing::TenOrderDay12(), a).ok());
}

TEST(Greedy, AllCatchAll) {
  const DaySnapshot day = testing::MakeDay(
      -11, 100, {0, 0}, testing::HandGroupEligibility(),
      {{1, {95}}, {2, {91, 3}}, {3, {100, 50}}});
  const Allocation a = GreedyConstruct(day);
  EXPECT_EQ(At(a, 3).size(), 3u);
}

TEST(Greedy, FillsCapacitiesAtScale) {
  GeneratorConfig config;
  const DaySnapshot day = GenerateDay(config, -11);
  const Allocation a = GreedyConstruct(day);
  EXPECT_EQ(At(a, 1).size(), 2500u);
  EXPECT_EQ(At(a, 2).size(), 5000u);
  EXPECT_TRUE(ValidateAllocation(day, a).ok());
}

TEST(Greedy, ThrowsWhenAFactoryCannotBeFilled) {
  DaySnapshot day = testing::TenOrderDay12();
  day.capacities = CapacityVector::Bounded({4, 5});
  EXPECT_THROW(GreedyConstruct(day), Infeasible);
}

TEST(Itps, NoSwapAtTheBound) {
  const Pair p = GeneratedPair(500, 4);
  const Allocation init = GreedyConstruct(p.day);
  const RecipeSiteMatrix same = BuildRecipeSiteMatrix(p.day, init);
  const SolveResult r = ItpsImprove(p.day, init, same, {200, 1});
  EXPECT_EQ(r.swaps_accepted, 0);
  EXPECT_EQ(r.allocation, init);
  EXPECT_EQ(r.objective_site, Ratio(0));
  EXPECT_EQ(r.status, SolveStatus::kOptimalCertified);
}

TEST(Itps, ImprovesMonotonicallyAndStaysFeasible) {
  const Pair p = GeneratedPair(2000, 6);
  const Allocation init = GreedyConstruct(p.day);
  const SolveResult r = ItpsImprove(p.day, init, p.prev, {1500, 3});
  EXPECT_TRUE(ValidateAllocation(p.day, r.allocation).ok());
  EXPECT_TRUE(NonIncreasing(r.objective_trace));
  EXPECT_EQ(r.objective_trace.size(), 1500u);
  EXPECT_LT(r.objective_site, WmapeSite(p.prev, BuildRecipeSiteMatrix(p.day, init)));
  EXPECT_GE(r.objective_site, r.objective_global);
  EXPECT_EQ(r.objective_site,
            WmapeSite(p.prev, BuildRecipeSiteMatrix(p.day, r.allocation)));
}

TEST(Itps, DeterministicForSeed) {
  const Pair p = GeneratedPair(800, 2);
  const Allocation init = GreedyConstruct(p.day);
  EXPECT_EQ(ItpsImprove(p.day, init, p.prev, {300, 9}).allocation,
            ItpsImprove(p.day, init, p.prev, {300, 9}).allocation);
}

TEST(Itps, RejectsInfeasibleInit) {
  const DaySnapshot day = testing::TenOrderDay12();
  Allocation bad = testing::TenOrderSolution12();
  bad.assignments[9] = FactoryId{1};
  EXPECT_THROW(ItpsImprove(day, bad, RecipeSiteMatrix(100, 3)), ValidationError);
}

TEST(Tabu, BestSeenIsMonotoneAndFeasible) {
  const Pair p = GeneratedPair(2000, 8);
  const Allocation init = GreedyConstruct(p.day);
  const SolveResult r = TabuImprove(p.day, init, p.prev, {});
  EXPECT_TRUE(ValidateAllocation(p.day, r.allocation).ok());
  EXPECT_TRUE(NonIncreasing(r.objective_trace));
  EXPECT_EQ(r.objective_trace.size(), 500u);
  EXPECT_EQ(r.objective_site,
            WmapeSite(p.prev, BuildRecipeSiteMatrix(p.day, r.allocation)));
  EXPECT_EQ(Ratio(r.objective_trace.back(), r.denominator), r.objective_site);
}

TEST(Tabu, DegenerateParametersStillHillClimb) {
  const Pair p = GeneratedPair(1000, 9);
  const Allocation init = GreedyConstruct(p.day);
  TabuParams params;
  params.tenure = 0;
  params.diversify_prob = 0.0;
  params.iterations = 200;
  const SolveResult r = TabuImprove(p.day, init, p.prev, params);
  EXPECT_TRUE(NonIncreasing(r.objective_trace));
  EXPECT_LT(r.objective_site,
            WmapeSite(p.prev, BuildRecipeSiteMatrix(p.day, init)));
}

TEST(Tabu, ParamValidation) {
  TabuParams p;
  p.candidate_pool = 0;
  EXPECT_THROW(p.Validate(), InvalidConfig);
  p = TabuParams{};
  p.diversify_prob = 1.5;
  EXPECT_THROW(p.Validate(), InvalidConfig);
  p = TabuParams{};
  p.tenure = -1;
  EXPECT_THROW(p.Validate(), InvalidConfig);
}

TEST(Tabu, MatchesBruteForceOnTenOrderInstances) {
  int matched = 0;
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    const Pair p = GeneratedPair(10, seed);
    const SolveResult brute = BruteForceOracle(p.day, p.prev);
    TabuParams params;
    params.seed = seed;
    const SolveResult tabu =
        TabuImprove(p.day, GreedyConstruct(p.day), p.prev, params);
    ASSERT_GE(tabu.objective_site, brute.objective_site);
    matched += tabu.objective_site == brute.objective_site;
  }
  EXPECT_GE(matched, 95);
}

TEST(Heuristics, NeverBeatTheOracle) {
  std::mt19937_64 rng(77);
  for (int t = 0; t < 100; ++t) {
    const testing::SmallCase c = testing::RandomSmallCase(rng, 9, 6);
    const SolveResult brute = BruteForceOracle(c.day, c.prev);
    const SolveResult itps = ItpsImprove(c.day, c.base, c.prev, {300, 1});
    const SolveResult tabu = TabuImprove(c.day, c.base, c.prev, {});
    EXPECT_GE(itps.objective_site, brute.objective_site);
    EXPECT_GE(tabu.objective_site, brute.objective_site);
    for (const SolveResult* r : {&itps, &tabu}) {
      if (r->status == SolveStatus::kOptimalCertified) {
        EXPECT_EQ(r->objective_site, r->objective_global);
      }
    }
  }
}

}  // namespace
}  // namespace bap
