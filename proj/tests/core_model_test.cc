#include <algorithm>
#include <random>

#include <gtest/gtest.h>

#include "bap/core_model.h"
#include "test_util.h"

namespace bap {
namespace {

using testing::HandGroupEligibility;
using testing::TenOrderDay12;
using testing::TenOrderSolution12;

Order MakeOrder(std::vector<int> recipes) {
  Order o;
  o.id = 1;
  for (int r : recipes) o.recipes.push_back(RecipeId{r});
  return o;
}

TEST(OrderEligibleFactories, GroupTwoRecipeGoesEverywhere) {
  EXPECT_EQ(OrderEligibleFactories(MakeOrder({30}), HandGroupEligibility())
                .ToString(),
            "F1,F2,F3");
}

TEST(OrderEligibleFactories, GroupFourRecipeForcesCatchAll) {
  EXPECT_EQ(OrderEligibleFactories(MakeOrder({93, 1, 36, 76}),
                                   HandGroupEligibility())
                .ToString(),
            "F3");
}

TEST(OrderEligibleFactories, AllTrueTableAllowsAll) {
  EXPECT_EQ(OrderEligibleFactories(MakeOrder({1, 2}), EligibilityTable(5, 4)),
            FactorySet::All(4));
}

TEST(OrderEligibleFactories, AlwaysContainsCatchAll) {
  std::mt19937_64 rng(3);
  for (int t = 0; t < 200; ++t) {
    EligibilityTable table(6, 3);
    for (int r = 1; r <= 6; ++r) {
      table.Set(RecipeId{r}, FactoryId{1}, rng() % 2);
      table.Set(RecipeId{r}, FactoryId{2}, rng() % 2);
    }
    Order o = MakeOrder({static_cast<int>(rng() % 6) + 1,
                         static_cast<int>(rng() % 6) + 1});
    EXPECT_TRUE(OrderEligibleFactories(o, table).Contains(FactoryId{3}));
  }
}

TEST(ValidateAllocation, TenOrderSolutionIsValid) {
  const ValidationReport report =
      ValidateAllocation(TenOrderDay12(), TenOrderSolution12());
  EXPECT_TRUE(report.ok()) << report.Summary();
}

TEST(ValidateAllocation, WrongCapacityIsReported) {
  DaySnapshot day = TenOrderDay12();
  day.capacities = CapacityVector::Bounded({3, 5});
  const ValidationReport report = ValidateAllocation(day, TenOrderSolution12());
  ASSERT_EQ(report.capacity_violations.size(), 1u);
  EXPECT_EQ(report.capacity_violations[0],
            (CapacityViolation{FactoryId{1}, 2, 3}));
  EXPECT_TRUE(report.eligibility_violations.empty());
}

TEST(ValidateAllocation, IneligibleOrderIsReported) {
  Allocation a = TenOrderSolution12();
  a.assignments[9] = FactoryId{1};
  a.assignments[2] = FactoryId{3};  // keep F1 at two orders
  const ValidationReport report = ValidateAllocation(TenOrderDay12(), a);
  EXPECT_TRUE(report.capacity_violations.empty());
  ASSERT_EQ(report.eligibility_violations.size(), 1u);
  EXPECT_EQ(report.eligibility_violations[0],
            (EligibilityViolation{9, FactoryId{1}}));
}

TEST(ValidateAllocation, MissingAndUnknownOrdersAreReported) {
  Allocation a = TenOrderSolution12();
  a.assignments.erase(7);
  a.assignments[77] = FactoryId{3};
  const ValidationReport report = ValidateAllocation(TenOrderDay12(), a);
  EXPECT_FALSE(report.ok());
  EXPECT_EQ(report.unassigned_or_duplicate.size(), 2u);
}

TEST(ValidateAllocation, MutationsOfValidAllocationsAreCaught) {
  std::mt19937_64 rng(11);
  int mutated = 0;
  for (int t = 0; t < 300; ++t) {
    const testing::SmallCase c = testing::RandomSmallCase(rng, 8, 6);
    ASSERT_TRUE(ValidateAllocation(c.day, c.base).ok());
    Allocation a = c.base;
    const Order& o = c.day.orders[rng() % c.day.orders.size()];
    const FactoryId old = a.assignments[o.id];
    const FactoryId moved{static_cast<int>(old.value % 3) + 1};
    a.assignments[o.id] = moved;
    // A single move changes the count of one bounded factory at least.
    EXPECT_FALSE(ValidateAllocation(c.day, a).ok());
    ++mutated;
  }
  EXPECT_EQ(mutated, 300);
}

TEST(RecipeSiteMatrix, MatchesToyTable) {
  const RecipeSiteMatrix m =
      BuildRecipeSiteMatrix(testing::ToyDay14(), testing::ToyAllocation14());
  EXPECT_EQ(m.at(RecipeId{5}, FactoryId{1}), 2);
  EXPECT_EQ(m.at(RecipeId{2}, FactoryId{3}), 1);
  EXPECT_EQ(m.at(RecipeId{9}, FactoryId{2}), 1);
  EXPECT_EQ(m.at(RecipeId{1}, FactoryId{1}), 0);
  EXPECT_EQ(m.Total(), 14);
}

TEST(RecipeSiteMatrix, CountsMultiplicity) {
  const DaySnapshot day = testing::MakeDay(-5, 8, {0, 1},
                                           EligibilityTable(8, 3),
                                           {{1, {7, 7}}});
  const RecipeSiteMatrix m =
      BuildRecipeSiteMatrix(day, testing::MakeAllocation(day, {2}));
  EXPECT_EQ(m.at(RecipeId{7}, FactoryId{2}), 2);
  EXPECT_EQ(m.Total(), 2);
}

TEST(RecipeSiteMatrix, MatchesNaiveRecountAndConservesUnits) {
  std::mt19937_64 rng(5);
  for (int t = 0; t < 300; ++t) {
    const testing::SmallCase c = testing::RandomSmallCase(rng, 8, 8, 4);
    const RecipeSiteMatrix m = BuildRecipeSiteMatrix(c.day, c.base);
    const auto naive = testing::NaiveMatrix(c.day, c.base);
    std::int64_t units = 0;
    for (const Order& o : c.day.orders) units += o.recipes.size();
    for (int i = 0; i < c.day.n_recipes; ++i) {
      for (int j = 0; j < 3; ++j) ASSERT_EQ(m.cell(i, j), naive[i][j]);
    }
    EXPECT_EQ(m.Total(), units);
    EXPECT_EQ(TotalRecipeUnits(c.day), units);
  }
}

TEST(RecipeSiteMatrix, InvariantUnderOrderPermutation) {
  std::mt19937_64 rng(8);
  for (int t = 0; t < 100; ++t) {
    const testing::SmallCase c = testing::RandomSmallCase(rng, 8, 6);
    DaySnapshot shuffled = c.day;
    std::shuffle(shuffled.orders.begin(), shuffled.orders.end(), rng);
    EXPECT_EQ(BuildRecipeSiteMatrix(c.day, c.base),
              BuildRecipeSiteMatrix(shuffled, c.base));
  }
}

TEST(RecipeSiteMatrix, RejectsInvalidAllocation) {
  Allocation a = TenOrderSolution12();
  a.assignments[9] = FactoryId{1};
  EXPECT_THROW(BuildRecipeSiteMatrix(TenOrderDay12(), a), ValidationError);
}

TEST(AggregateRecipeVector, MatchesToyGlobalColumn) {
  const std::vector<std::int64_t> v = AggregateRecipeVector(
      BuildRecipeSiteMatrix(testing::ToyDay14(), testing::ToyAllocation14()));
  const std::vector<std::int64_t> expected = {0, 2, 1, 1, 3, 2, 1, 1, 2, 1};
  EXPECT_EQ(v, expected);
}

TEST(AggregateRecipeVector, ZeroMatrix) {
  EXPECT_EQ(AggregateRecipeVector(RecipeSiteMatrix(4, 3)),
            std::vector<std::int64_t>(4, 0));
}

TEST(AggregateRecipeVector, EqualsManualRowSums) {
  std::mt19937_64 rng(2);
  RecipeSiteMatrix m(7, 4);
  std::vector<std::int64_t> expected(7, 0);
  for (int i = 0; i < 7; ++i) {
    for (int j = 0; j < 4; ++j) {
      m.cell(i, j) = static_cast<std::int64_t>(rng() % 50);
      expected[i] += m.cell(i, j);
    }
  }
  EXPECT_EQ(AggregateRecipeVector(m), expected);
}

TEST(CheckSnapshot, RejectsMalformedDays) {
  DaySnapshot day = TenOrderDay12();
  EXPECT_NO_THROW(CheckSnapshot(day));

  DaySnapshot dup = day;
  dup.orders[1].id = 1;
  EXPECT_THROW(CheckSnapshot(dup), InvalidInstance);

  DaySnapshot out_of_range = day;
  out_of_range.orders[0].recipes.push_back(RecipeId{101});
  EXPECT_THROW(CheckSnapshot(out_of_range), InvalidInstance);

  DaySnapshot empty = day;
  empty.orders[0].recipes.clear();
  EXPECT_THROW(CheckSnapshot(empty), InvalidInstance);
}

TEST(CapacityVector, CatchAllIsUnbounded) {
  const CapacityVector c = CapacityVector::Bounded({2, 5});
  EXPECT_EQ(c.size(), 3);
  EXPECT_TRUE(c.IsBounded(FactoryId{1}));
  EXPECT_FALSE(c.IsBounded(FactoryId{3}));
  EXPECT_EQ(c.BoundedTotal(), 7);
}

TEST(Allocation, PositionRoundTrip) {
  const DaySnapshot day = TenOrderDay12();
  const std::vector<int> pos =
      PositionsFromAllocation(day, TenOrderSolution12());
  EXPECT_EQ(AllocationFromPositions(day, pos), TenOrderSolution12());
}

}  // namespace
}  // namespace bap
