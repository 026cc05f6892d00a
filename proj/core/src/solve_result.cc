#include "bap/solve_result.h"

namespace bap {

const char* StatusName(SolveStatus s) {
  switch (s) {
    case SolveStatus::kOptimalCertified:
      return "OptimalCertified";
    case SolveStatus::kOptimalExhausted:
      return "OptimalExhausted";
    case SolveStatus::kFeasibleBudgetHit:
      return "FeasibleBudgetHit";
  }
  return "?";
}

SolveStatus StatusFromName(const std::string& name) {
  if (name == "OptimalCertified") return SolveStatus::kOptimalCertified;
  if (name == "OptimalExhausted") return SolveStatus::kOptimalExhausted;
  if (name == "FeasibleBudgetHit") return SolveStatus::kFeasibleBudgetHit;
  throw InvalidInstance("unknown solve status '" + name + "'");
}

void FinalizeObjectives(const DaySnapshot& day, const RecipeSiteMatrix& prev,
                        SolveResult& result) {
  const RecipeSiteMatrix cur = BuildRecipeSiteMatrix(day, result.allocation);
  const WmapePair pair = ComputeWmapePair(prev, cur);
  result.objective_site = pair.site;
  result.objective_global = pair.global;
  result.denominator = pair.denominator;
  if (pair.site == pair.global &&
      result.status == SolveStatus::kFeasibleBudgetHit) {
    result.status = SolveStatus::kOptimalCertified;
    result.lower_bound_numerator = GlobalDeviation(prev, cur);
  }
}

}  // namespace bap
