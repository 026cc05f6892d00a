#include <fstream>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "bap/exact.h"
#include "bap/generator.h"
#include "bap/heuristics.h"
#include "bap/milp.h"
#include "test_util.h"

namespace bap {
namespace {

struct TenOrder {
  DaySnapshot day = testing::TenOrderDay11();
  RecipeSiteMatrix prev = BuildRecipeSiteMatrix(testing::TenOrderDay12(),
                                                testing::TenOrderSolution12());
};

TEST(Milp, CountsFollowTheFormula) {
  const TenOrder t;
  const MilpCounts counts = CountMilp(BuildMilp(t.day, t.prev));
  EXPECT_EQ(counts.classes, 10);
  EXPECT_EQ(counts.integer_columns, 10 * 3);
  EXPECT_EQ(counts.continuous_columns, 100 * 3);
  EXPECT_EQ(counts.constraints, 10 + 2 + 2 * 100 * 3);
}

TEST(Milp, CountsAtScale) {
  GeneratorConfig config;
  const DaySnapshot ld12 = GenerateDay(config, -12);
  const DaySnapshot ld11 = EvolveDay(ld12, config, -11);
  const RecipeSiteMatrix prev = BuildRecipeSiteMatrix(ld12, GreedyConstruct(ld12));
  const std::int64_t k = static_cast<std::int64_t>(ClassAggregate(ld11).size());
  const MilpCounts counts = CountMilp(BuildMilp(ld11, prev));
  EXPECT_EQ(counts.integer_columns, k * 3);
  EXPECT_EQ(counts.continuous_columns, 300);
  EXPECT_EQ(counts.constraints, k + 2 + 600);
}

TEST(Milp, RoundTripsThroughText) {
  const TenOrder t;
  const MpsModel model = BuildMilp(t.day, t.prev);
  std::stringstream text;
  WriteMps(model, text);
  const MpsModel back = ReadMps(text);
  EXPECT_EQ(back, model);
  std::stringstream again;
  WriteMps(back, again);
  EXPECT_EQ(again.str(), text.str());
}

TEST(Milp, FixedFormatLayout) {
  const TenOrder t;
  std::stringstream text;
  WriteMps(BuildMilp(t.day, t.prev), text);
  std::string line;
  std::vector<std::string> sections;
  bool saw_marker = false;
  while (std::getline(text, line)) {
    if (!line.empty() && line[0] != ' ') {
      sections.push_back(line.substr(0, line.find(' ')));
    }
    if (line.find("'MARKER'") != std::string::npos) saw_marker = true;
    ASSERT_LE(line.size(), 61u);
  }
  EXPECT_EQ(sections, (std::vector<std::string>{"NAME", "ROWS", "COLUMNS",
                                                "RHS", "BOUNDS", "ENDATA"}));
  EXPECT_TRUE(saw_marker);
}

TEST(Milp, AllocationPointIsFeasibleWithMatchingObjective) {
  std::mt19937_64 rng(3);
  for (int t = 0; t < 100; ++t) {
    const testing::SmallCase c = testing::RandomSmallCase(rng, 10, 8);
    const MpsModel model = BuildMilp(c.day, c.prev);
    const MilpEvaluation e =
        EvaluateMilp(model, MilpPointFromAllocation(c.day, c.prev, c.base));
    EXPECT_LT(e.max_violation, 1e-9);
    EXPECT_TRUE(e.integral);
    EXPECT_NEAR(e.objective,
                ToDouble(WmapeSite(c.prev, BuildRecipeSiteMatrix(c.day, c.base))),
                1e-8);
  }
}

TEST(Milp, ReachablePrevGivesZeroPoint) {
  const DaySnapshot day = testing::TenOrderDay12();
  const RecipeSiteMatrix prev =
      BuildRecipeSiteMatrix(day, testing::TenOrderSolution12());
  const MilpEvaluation e = EvaluateMilp(
      BuildMilp(day, prev),
      MilpPointFromAllocation(day, prev, testing::TenOrderSolution12()));
  EXPECT_EQ(e.objective, 0.0);
  EXPECT_LT(e.max_violation, 1e-9);
}

TEST(Milp, InfeasiblePointIsDetected) {
  const TenOrder t;
  const MpsModel model = BuildMilp(t.day, t.prev);
  auto point = MilpPointFromAllocation(t.day, t.prev, GreedyConstruct(t.day));
  for (auto& [name, value] : point) {
    if (name[0] == 'D') value = 0.0;
  }
  EXPECT_GT(EvaluateMilp(model, point).max_violation, 0.5);
}

TEST(Milp, NumberFormatting) {
  EXPECT_EQ(FormatMpsNumber(3.0), "3");
  EXPECT_EQ(FormatMpsNumber(-12.0), "-12");
  EXPECT_LE(FormatMpsNumber(1.0 / 24883.0).size(), 12u);
  EXPECT_NEAR(std::stod(FormatMpsNumber(1.0 / 24883.0)), 1.0 / 24883.0, 1e-11);
}

TEST(Milp, ReaderRejectsBrokenFiles) {
  std::stringstream no_end("NAME X\nROWS\n N OBJ\nCOLUMNS\n");
  EXPECT_THROW(ReadMps(no_end), InvalidInstance);
  std::stringstream ranges("NAME X\nROWS\n N OBJ\nRANGES\nENDATA\n");
  EXPECT_THROW(ReadMps(ranges), InvalidInstance);
}

TEST(Milp, ExportWritesFileAndReportsIoErrors) {
  const TenOrder t;
  const std::string dir = testing::TempDir("milp");
  const std::string path = dir + "/model.mps";
  const MilpCounts counts = ExportMilp(t.day, t.prev, path);
  std::ifstream in(path);
  ASSERT_TRUE(in.good());
  EXPECT_EQ(CountMilp(ReadMps(in)).integer_columns, counts.integer_columns);
  EXPECT_THROW(ExportMilp(t.day, t.prev, dir + "/missing/dir/model.mps"),
               IoError);
}

}  // namespace
}  // namespace bap
