#ifndef BAP_EXACT_H_
#define BAP_EXACT_H_

#include <cstdint>
#include <optional>
#include <vector>

#include "bap/core_model.h"
#include "bap/heuristics.h"
#include "bap/solve_result.h"

namespace bap {

// Orders with the same recipe multiset and eligible set. The objective
// depends on an allocation only through per-class factory counts.
struct OrderClass {
  std::vector<RecipeId> recipes;  // sorted multiset
  FactorySet eligible;
  std::vector<OrderId> member_ids;  // ascending
  std::int64_t count() const {
    return static_cast<std::int64_t>(member_ids.size());
  }
};

// Partition of the day's orders into classes, ordered by smallest member id.
std::vector<OrderClass> ClassAggregate(const DaySnapshot& day);

// Per-recipe range relaxation: for each recipe the smallest possible
// sum_j |a(i,j) - prev(i,j)| given only which factories each order may use.
// Always >= the global deviation numerator.
std::int64_t RangeLowerBound(const DaySnapshot& day,
                             const RecipeSiteMatrix& prev);

struct ExactOptions {
  double budget_seconds = 600.0;
  // Initial incumbent. Without one, greedy followed by tabu search is used.
  std::optional<Allocation> warm_start;
  // Members of a class keep the factory they have here whenever the class
  // counts allow it (typically the previous day's allocation).
  std::optional<Allocation> id_hint;
  TabuParams warm_tabu;
  // Rounds of perturb-and-descend without improvement before the primal
  // phase hands over to tree search.
  int polish_stall_rounds = 40;
};

// Branch and bound over class-count variables y(c, j) with the range bound
// at every node. Status is OptimalCertified when site == global,
// OptimalExhausted when the incumbent is proven optimal otherwise (it meets
// the root range bound, or the tree is exhausted), and FeasibleBudgetHit when
// the time budget runs out first.
// Throws Infeasible if no allocation satisfies the constraints.
SolveResult ExactSolve(const DaySnapshot& day, const RecipeSiteMatrix& prev,
                       const ExactOptions& options = {});

// Exhaustive enumeration of every feasible assignment. Refuses instances
// with more than 2^20 raw assignments (k * log2(m) > 20).
SolveResult BruteForceOracle(const DaySnapshot& day,
                             const RecipeSiteMatrix& prev);

}  // namespace bap

#endif  // BAP_EXACT_H_
