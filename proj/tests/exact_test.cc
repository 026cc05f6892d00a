#include <algorithm>
#include <limits>
#include <random>

#include <gtest/gtest.h>

#include "bap/exact.h"
#include "bap/generator.h"
#include "bap/heuristics.h"
#include "test_util.h"

namespace bap {
namespace {

// Independent enumeration of all 3^n assignments with plain validity checks.
// Returns the smallest site deviation; `fixed` pins orders to factories.
std::int64_t EnumerateOptimum(const DaySnapshot& day,
                              const RecipeSiteMatrix& prev,
                              const std::map<OrderId, int>& fixed = {}) {
  const int n = static_cast<int>(day.orders.size());
  std::vector<int> f(n, 1);
  std::int64_t best = std::numeric_limits<std::int64_t>::max();
  while (true) {
    bool ok = true;
    std::int64_t c1 = 0;
    std::int64_t c2 = 0;
    for (int p = 0; p < n && ok; ++p) {
      const Order& o = day.orders[p];
      auto it = fixed.find(o.id);
      if (it != fixed.end() && it->second != f[p]) ok = false;
      for (RecipeId r : o.recipes) {
        ok = ok && day.eligibility.Eligible(r, FactoryId{f[p]});
      }
      c1 += f[p] == 1;
      c2 += f[p] == 2;
    }
    ok = ok && c1 == *day.capacities.at(FactoryId{1}) &&
         c2 == *day.capacities.at(FactoryId{2});
    if (ok) {
      const Allocation a = testing::MakeAllocation(day, f);
      RecipeSiteMatrix cur(day.n_recipes, 3);
      const auto naive = testing::NaiveMatrix(day, a);
      for (int i = 0; i < day.n_recipes; ++i) {
        for (int j = 0; j < 3; ++j) cur.cell(i, j) = naive[i][j];
      }
      best = std::min(best, testing::NaiveSiteGlobal(prev, cur).first);
    }
    int k = 0;
    while (k < n && f[k] == 3) f[k++] = 1;
    if (k == n) break;
    f[k]++;
  }
  return best;
}

std::int64_t Numerator(const SolveResult& r) {
  return (r.objective_site * Ratio(r.denominator)).numerator();
}

TEST(ClassAggregate, TenOrderDayHasTenClasses) {
  EXPECT_EQ(ClassAggregate(testing::TenOrderDay12()).size(), 10u);
}

TEST(ClassAggregate, CopiesFormOneClass) {
  std::vector<testing::OrderSpec> orders;
  for (int k = 1; k <= 6; ++k) orders.push_back({k, {3, 1}});
  const DaySnapshot day =
      testing::MakeDay(-11, 5, {2, 2}, EligibilityTable(5, 3), orders);
  const auto classes = ClassAggregate(day);
  ASSERT_EQ(classes.size(), 1u);
  EXPECT_EQ(classes[0].count(), 6);
  EXPECT_EQ(classes[0].recipes, (std::vector<RecipeId>{RecipeId{1}, RecipeId{3}}));
}

TEST(ClassAggregate, ObjectiveDependsOnlyOnClassCounts) {
  std::mt19937_64 rng(12);
  for (int t = 0; t < 200; ++t) {
    testing::SmallCase c = testing::RandomSmallCase(rng, 10, 3, 2);
    const auto classes = ClassAggregate(c.day);
    Allocation permuted = c.base;
    for (const OrderClass& cls : classes) {
      std::vector<FactoryId> fs;
      for (OrderId id : cls.member_ids) fs.push_back(c.base.assignments.at(id));
      std::shuffle(fs.begin(), fs.end(), rng);
      for (std::size_t k = 0; k < fs.size(); ++k) {
        permuted.assignments[cls.member_ids[k]] = fs[k];
      }
    }
    EXPECT_EQ(WmapeSite(c.prev, BuildRecipeSiteMatrix(c.day, c.base)),
              WmapeSite(c.prev, BuildRecipeSiteMatrix(c.day, permuted)));
  }
}

TEST(RangeLowerBound, BetweenGlobalAndOptimum) {
  std::mt19937_64 rng(14);
  for (int t = 0; t < 200; ++t) {
    const testing::SmallCase c = testing::RandomSmallCase(rng, 10, 8);
    const std::int64_t bound = RangeLowerBound(c.day, c.prev);
    const std::int64_t global =
        testing::NaiveSiteGlobal(c.prev, BuildRecipeSiteMatrix(c.day, c.base))
            .second;
    EXPECT_GE(bound, global);
    EXPECT_LE(bound, EnumerateOptimum(c.day, c.prev));
  }
}

TEST(BruteForce, MatchesIndependentEnumeration) {
  std::mt19937_64 rng(15);
  for (int t = 0; t < 100; ++t) {
    const testing::SmallCase c = testing::RandomSmallCase(rng, 9, 8);
    const SolveResult r = BruteForceOracle(c.day, c.prev);
    EXPECT_TRUE(ValidateAllocation(c.day, r.allocation).ok());
    EXPECT_EQ(Numerator(r), EnumerateOptimum(c.day, c.prev));
  }
}

TEST(BruteForce, TenOrderOptimumKeepsCarriedOrders) {
  const DaySnapshot ld12 = testing::TenOrderDay12();
  const DaySnapshot ld11 = testing::TenOrderDay11();
  const RecipeSiteMatrix prev =
      BuildRecipeSiteMatrix(ld12, testing::TenOrderSolution12());
  const SolveResult r = BruteForceOracle(ld11, prev);
  const std::int64_t optimum = EnumerateOptimum(ld11, prev);
  EXPECT_EQ(Numerator(r), optimum);
  // An optimum exists with orders 1-4 where they were on LD12.
  EXPECT_EQ(EnumerateOptimum(ld11, prev, {{1, 2}, {2, 1}, {3, 1}, {4, 2}}),
            optimum);
  const SolveResult exact = ExactSolve(ld11, prev);
  EXPECT_EQ(exact.objective_site, r.objective_site);
}

TEST(BruteForce, SingleOrderSingleFactory) {
  const DaySnapshot day = testing::MakeDay(
      -11, 100, {0, 0}, testing::HandGroupEligibility(), {{1, {95}}});
  const SolveResult r = BruteForceOracle(day, RecipeSiteMatrix(100, 3));
  EXPECT_EQ(r.allocation.assignments.at(1), FactoryId{3});
}

TEST(BruteForce, RefusesLargeInstances) {
  GeneratorConfig config;
  config.total_orders = 40;
  const DaySnapshot day = GenerateDay(config, -11);
  EXPECT_THROW(BruteForceOracle(day, RecipeSiteMatrix(100, 3)),
               InstanceTooLarge);
}

TEST(Exact, EqualsOracleOnSmallInstances) {
  std::mt19937_64 rng(16);
  for (int t = 0; t < 200; ++t) {
    const testing::SmallCase c = testing::RandomSmallCase(rng, 10, 8);
    const SolveResult brute = BruteForceOracle(c.day, c.prev);
    const SolveResult exact = ExactSolve(c.day, c.prev);
    ASSERT_EQ(exact.objective_site, brute.objective_site) << "case " << t;
    EXPECT_TRUE(ValidateAllocation(c.day, exact.allocation).ok());
    EXPECT_NE(exact.status, SolveStatus::kFeasibleBudgetHit);
    if (exact.status == SolveStatus::kOptimalCertified) {
      EXPECT_EQ(exact.objective_site, exact.objective_global);
    } else {
      EXPECT_GT(exact.objective_site, exact.objective_global);
    }
    ASSERT_TRUE(exact.lower_bound_numerator.has_value());
    EXPECT_EQ(*exact.lower_bound_numerator, Numerator(exact));
  }
}

TEST(Exact, CertifiesZeroWhenPrevIsReachable) {
  const DaySnapshot day = testing::TenOrderDay12();
  const RecipeSiteMatrix prev =
      BuildRecipeSiteMatrix(day, testing::TenOrderSolution12());
  const SolveResult r = ExactSolve(day, prev);
  EXPECT_EQ(r.objective_site, Ratio(0));
  EXPECT_EQ(r.status, SolveStatus::kOptimalCertified);
  EXPECT_EQ(r.nodes_explored, 0);
}

TEST(Exact, ProvesOptimumOnGeneratedDays) {
  for (std::uint64_t seed : {1, 2}) {
    GeneratorConfig config;
    config.total_orders = 1000;
    config.seed = seed;
    const DaySnapshot ld12 = GenerateDay(config, -12);
    const DaySnapshot ld11 = EvolveDay(ld12, config, -11);
    const RecipeSiteMatrix prev =
        BuildRecipeSiteMatrix(ld12, GreedyConstruct(ld12));
    ExactOptions options;
    options.budget_seconds = 60;
    const SolveResult r = ExactSolve(ld11, prev, options);
    EXPECT_TRUE(ValidateAllocation(ld11, r.allocation).ok());
    EXPECT_NE(r.status, SolveStatus::kFeasibleBudgetHit);
    EXPECT_GE(Numerator(r), RangeLowerBound(ld11, prev));
    const SolveResult tabu = TabuImprove(ld11, GreedyConstruct(ld11), prev);
    EXPECT_LE(r.objective_site, tabu.objective_site);
  }
}

TEST(Exact, WarmStartIsNeverWorsened) {
  GeneratorConfig config;
  config.total_orders = 500;
  const DaySnapshot ld12 = GenerateDay(config, -12);
  const DaySnapshot ld11 = EvolveDay(ld12, config, -11);
  const RecipeSiteMatrix prev = BuildRecipeSiteMatrix(ld12, GreedyConstruct(ld12));
  const SolveResult tabu = TabuImprove(ld11, GreedyConstruct(ld11), prev);
  ExactOptions options;
  options.warm_start = tabu.allocation;
  options.budget_seconds = 5;
  const SolveResult r = ExactSolve(ld11, prev, options);
  EXPECT_LE(r.objective_site, tabu.objective_site);
}

TEST(Exact, ErrorCases) {
  DaySnapshot day = testing::TenOrderDay12();
  const RecipeSiteMatrix prev(100, 3);
  ExactOptions options;
  options.budget_seconds = 0;
  EXPECT_THROW(ExactSolve(day, prev, options), InvalidConfig);
  day.capacities = CapacityVector::Bounded({4, 5});
  EXPECT_THROW(ExactSolve(day, prev), Infeasible);
  EXPECT_THROW(RangeLowerBound(day, prev), Infeasible);
  EXPECT_THROW(ExactSolve(testing::TenOrderDay12(), RecipeSiteMatrix(99, 3)),
               InvalidInstance);
  Allocation bad = testing::TenOrderSolution12();
  bad.assignments[9] = FactoryId{1};
  options = ExactOptions{};
  options.warm_start = bad;
  EXPECT_THROW(ExactSolve(testing::TenOrderDay12(), prev, options),
               ValidationError);
}

}  // namespace
}  // namespace bap
