#ifndef BAP_SOLVE_RESULT_H_
#define BAP_SOLVE_RESULT_H_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "bap/core_model.h"
#include "bap/metrics.h"

namespace bap {

enum class SolveStatus {
  // site == global: the global deviation is a lower bound, so this is optimal.
  kOptimalCertified,
  // Proven optimal with site > global (range bound met or tree exhausted).
  kOptimalExhausted,
  // Time or iteration budget ran out; best incumbent returned.
  kFeasibleBudgetHit,
};

const char* StatusName(SolveStatus s);
SolveStatus StatusFromName(const std::string& name);

struct SolveResult {
  Allocation allocation;
  Ratio objective_site;
  Ratio objective_global;
  std::int64_t denominator = 0;
  SolveStatus status = SolveStatus::kFeasibleBudgetHit;
  double elapsed_seconds = 0.0;
  std::int64_t nodes_explored = 0;
  std::int64_t swaps_accepted = 0;
  std::int64_t iterations = 0;
  // Numerator of the lower bound that certified the result, if any.
  std::optional<std::int64_t> lower_bound_numerator;
  // Heuristics: site-deviation numerator of the tracked objective after
  // every iteration (current for ITPS, best-seen for tabu).
  std::vector<std::int64_t> objective_trace;
};

// Fills objectives/denominator from the allocation and marks the result
// certified when site == global.
void FinalizeObjectives(const DaySnapshot& day, const RecipeSiteMatrix& prev,
                        SolveResult& result);

}  // namespace bap

#endif  // BAP_SOLVE_RESULT_H_
