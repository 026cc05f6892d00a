#include "bap/heuristics.h"

#include <algorithm>
#include <chrono>
#include <numeric>
#include <string>

#include "bap/deviation_state.h"
#include "bap/random.h"

namespace bap {
namespace {

using Clock = std::chrono::steady_clock;

double SecondsSince(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::vector<int> ValidatedPositions(const DaySnapshot& day,
                                    const Allocation& init) {
  ValidationReport report = ValidateAllocation(day, init);
  if (!report.ok()) throw ValidationError(std::move(report));
  return PositionsFromAllocation(day, init);
}

}  // namespace

Allocation GreedyConstruct(const DaySnapshot& day) {
  CheckSnapshot(day);
  const std::size_t n = day.orders.size();
  std::vector<FactorySet> eligible(n);
  for (std::size_t p = 0; p < n; ++p) {
    eligible[p] = OrderEligibleFactories(day.orders[p], day.eligibility);
  }
  const int catch_all = day.n_factories - 1;
  std::vector<int> assigned(n, -1);
  std::uint32_t open = FactorySet::All(day.n_factories).bits();

  std::vector<int> candidates;
  for (int j = 0; j < catch_all; ++j) {
    const std::int64_t cap = *day.capacities.at(FactoryId{j + 1});
    candidates.clear();
    for (std::size_t p = 0; p < n; ++p) {
      if (assigned[p] < 0 && eligible[p].ContainsIndex(j)) {
        candidates.push_back(static_cast<int>(p));
      }
    }
    if (static_cast<std::int64_t>(candidates.size()) < cap) {
      throw Infeasible("greedy construction cannot fill F" +
                       std::to_string(j + 1) + ": capacity " +
                       std::to_string(cap) + ", only " +
                       std::to_string(candidates.size()) +
                       " eligible orders remain");
    }
    auto rank = [&](int p) {
      return FactorySet(eligible[p].bits() & open).Size();
    };
    std::stable_sort(candidates.begin(), candidates.end(), [&](int a, int b) {
      const int ra = rank(a);
      const int rb = rank(b);
      if (ra != rb) return ra < rb;
      return day.orders[a].id < day.orders[b].id;
    });
    for (std::int64_t k = 0; k < cap; ++k) assigned[candidates[k]] = j;
    open &= ~(1u << j);
  }
  for (int& f : assigned) {
    if (f < 0) f = catch_all;
  }
  return AllocationFromPositions(day, assigned);
}

void TabuParams::Validate() const {
  if (iterations < 0) throw InvalidConfig("tabu iterations must be >= 0");
  if (tenure < 0) throw InvalidConfig("tabu tenure must be >= 0");
  if (iterations > 0 && tenure >= iterations) {
    throw InvalidConfig("tabu tenure must be smaller than the iteration count");
  }
  if (candidate_pool < 1) throw InvalidConfig("candidate pool must be >= 1");
  if (diversify_prob < 0.0 || diversify_prob > 1.0) {
    throw InvalidConfig("diversification probability must lie in [0, 1]");
  }
}

SolveResult ItpsImprove(const DaySnapshot& day, const Allocation& init,
                        const RecipeSiteMatrix& prev,
                        const ItpsParams& params) {
  if (params.iterations <= 0) {
    throw InvalidConfig("ITPS iterations must be positive");
  }
  const auto start = Clock::now();
  DeviationState state(day, prev, ValidatedPositions(day, init));
  Rng rng(DeriveSeed(params.seed, "itps"));

  SolveResult result;
  result.objective_trace.reserve(params.iterations);
  for (std::int64_t it = 0; it < params.iterations; ++it) {
    // At the global bound no swap can improve.
    if (state.abs_sum() == state.global_abs_sum()) break;
    result.iterations++;
    const auto cells = MixedPositiveCells(state);
    const auto move = ProposeTargetedSwap(state, cells, rng);
    if (move && state.SwapDelta(move->first, move->second) < 0) {
      state.ApplySwap(move->first, move->second);
      result.swaps_accepted++;
    }
    result.objective_trace.push_back(state.abs_sum());
  }
  result.allocation = AllocationFromPositions(day, state.factories());
  result.elapsed_seconds = SecondsSince(start);
  FinalizeObjectives(day, prev, result);
  return result;
}

SolveResult TabuImprove(const DaySnapshot& day, const Allocation& init,
                        const RecipeSiteMatrix& prev,
                        const TabuParams& params) {
  params.Validate();
  const auto start = Clock::now();
  DeviationState state(day, prev, ValidatedPositions(day, init));
  Rng rng(DeriveSeed(params.seed, "tabu"));

  std::vector<std::int64_t> tabu_until(state.n_orders(), 0);
  std::int64_t best_abs = state.abs_sum();
  std::vector<int> best = state.factories();

  SolveResult result;
  result.objective_trace.reserve(params.iterations);
  for (std::int64_t it = 1; it <= params.iterations; ++it) {
    if (best_abs == state.global_abs_sum()) break;
    result.iterations++;
    std::optional<std::pair<int, int>> chosen;
    if (rng.Bernoulli(params.diversify_prob)) {
      chosen = RandomFeasibleSwap(state, rng);
    } else {
      const auto cells = MixedPositiveCells(state);
      std::int64_t chosen_delta = 0;
      std::pair<OrderId, OrderId> chosen_key{};
      for (int k = 0; k < params.candidate_pool; ++k) {
        const auto move = ProposeTargetedSwap(state, cells, rng);
        if (!move) continue;
        const auto [a, b] = *move;
        const std::int64_t delta = state.SwapDelta(a, b);
        const bool tabu = tabu_until[a] >= it || tabu_until[b] >= it;
        const bool aspiration = state.abs_sum() + delta < best_abs;
        if (tabu && !aspiration) continue;
        const std::pair<OrderId, OrderId> key =
            std::minmax(state.id_of(a), state.id_of(b));
        if (!chosen || delta < chosen_delta ||
            (delta == chosen_delta && key < chosen_key)) {
          chosen = move;
          chosen_delta = delta;
          chosen_key = key;
        }
      }
      // Every sampled move was tabu: keep moving with a random swap.
      if (!chosen) chosen = RandomFeasibleSwap(state, rng);
    }
    if (chosen) {
      const auto [a, b] = *chosen;
      state.ApplySwap(a, b);
      result.swaps_accepted++;
      tabu_until[a] = it + params.tenure;
      tabu_until[b] = it + params.tenure;
      if (state.abs_sum() < best_abs) {
        best_abs = state.abs_sum();
        best = state.factories();
      }
    }
    result.objective_trace.push_back(best_abs);
  }
  result.allocation = AllocationFromPositions(day, best);
  result.elapsed_seconds = SecondsSince(start);
  FinalizeObjectives(day, prev, result);
  return result;
}

}  // namespace bap
