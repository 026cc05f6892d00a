#ifndef BAP_HEURISTICS_H_
#define BAP_HEURISTICS_H_

#include <cstdint>

#include "bap/core_model.h"
#include "bap/solve_result.h"

namespace bap {

// Fills bounded factories in id order. For each, candidates are unassigned
// eligible orders ranked by how many still-open factories they could use
// (fewest first), then by order id. Leftovers go to the catch-all.
// Throws Infeasible naming the factory that cannot be filled.
Allocation GreedyConstruct(const DaySnapshot& day);

// Iterative targeted pairwise swap. One iteration proposes one targeted swap
// and applies it only if it strictly lowers wmape_site.
struct ItpsParams {
  std::int64_t iterations = 1500;
  std::uint64_t seed = 1;
};

// Tabu search over 1:1 swaps. One iteration evaluates a pool of sampled
// swaps and applies the best admissible one (or, with diversify_prob, a
// random swap). Both moved orders stay tabu for `tenure` iterations; a tabu
// move is admissible if it beats the best objective seen so far.
struct TabuParams {
  std::int64_t iterations = 500;
  std::int64_t tenure = 25;
  int candidate_pool = 50;
  double diversify_prob = 0.10;
  std::uint64_t seed = 1;

  void Validate() const;  // throws InvalidConfig
};

SolveResult ItpsImprove(const DaySnapshot& day, const Allocation& init,
                        const RecipeSiteMatrix& prev,
                        const ItpsParams& params = {});

SolveResult TabuImprove(const DaySnapshot& day, const Allocation& init,
                        const RecipeSiteMatrix& prev,
                        const TabuParams& params = {});

}  // namespace bap

#endif  // BAP_HEURISTICS_H_
