#ifndef BAP_DEVIATION_STATE_H_
#define BAP_DEVIATION_STATE_H_

#include <cstdint>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

#include "bap/core_model.h"
#include "bap/metrics.h"
#include "bap/random.h"

namespace bap {

// A 1:1 exchange of two orders sitting at different factories. Capacities
// are preserved by construction.
struct SwapMove {
  OrderId order_a = 0;
  OrderId order_b = 0;
};

// Incremental view of one day's allocation against the previous day's
// recipe-site matrix: dev(i, j) = cur(i, j) - prev(i, j) and
// abs_sum = sum |dev|, so wmape_site = abs_sum / denom.
//
// Orders are addressed by position in DaySnapshot::orders. Swap deltas touch
// only the recipes of the two orders involved.
class DeviationState {
 public:
  DeviationState(const DaySnapshot& day, const RecipeSiteMatrix& prev,
                 std::span<const int> factory_index);

  int n_orders() const { return static_cast<int>(factory_.size()); }
  int n_recipes() const { return n_recipes_; }
  int n_factories() const { return n_factories_; }

  std::int64_t abs_sum() const { return abs_sum_; }
  std::int64_t denom() const { return denom_; }
  Ratio WmapeSite() const { return Ratio(abs_sum_, denom_); }
  // sum_i |sum_j dev(i, j)|; invariant under swaps.
  std::int64_t global_abs_sum() const { return global_abs_sum_; }

  std::int64_t dev(int i, int j) const {
    return dev_[static_cast<std::size_t>(i) * n_factories_ + j];
  }
  const RecipeSiteMatrix& prev() const { return prev_; }
  RecipeSiteMatrix Current() const;

  int factory_of(int pos) const { return factory_[pos]; }
  const std::vector<int>& factories() const { return factory_; }
  FactorySet eligible(int pos) const { return eligible_[pos]; }
  OrderId id_of(int pos) const { return ids_[pos]; }
  std::optional<int> PositionOf(OrderId id) const;

  // Distinct (recipe, multiplicity) entries of an order.
  struct Entry {
    int recipe = 0;
    int mult = 0;
  };
  std::span<const Entry> entries(int pos) const {
    return {entries_.data() + entry_begin_[pos],
            entries_.data() + entry_begin_[pos + 1]};
  }

  // Orders currently assigned to factory j.
  std::span<const int> members(int j) const { return members_[j]; }
  // Orders at factory j containing recipe i.
  int cell_size(int i, int j) const {
    return static_cast<int>(cell_members_[CellIndex(i, j)].size());
  }
  int cell_member(int i, int j, int k) const {
    return entry_owner_[cell_members_[CellIndex(i, j)][k]];
  }

  // True when a and b sit at different factories and each is eligible at
  // the other's factory.
  bool SwapFeasible(int a, int b) const;

  // Change of abs_sum if a and b exchange factories. Precondition: feasible.
  std::int64_t SwapDelta(int a, int b) const;
  // Change of abs_sum if a alone moved to factory `to` (ignores capacity).
  std::int64_t MoveDelta(int a, int to) const;

  void ApplySwap(int a, int b);

  // Moves `a` to factory `to` without a partner. Only valid as part of a
  // capacity-preserving cycle.
  void ApplyMove(int a, int to);

 private:
  std::size_t CellIndex(int i, int j) const {
    return static_cast<std::size_t>(i) * n_factories_ + j;
  }
  void AddToCell(int entry, int i, int j);
  void RemoveFromCell(int entry, int i, int j);

  int n_recipes_;
  int n_factories_;
  std::int64_t denom_ = 0;
  std::int64_t abs_sum_ = 0;
  std::int64_t global_abs_sum_ = 0;
  RecipeSiteMatrix prev_;
  std::vector<std::int64_t> dev_;

  std::vector<OrderId> ids_;
  std::vector<int> factory_;
  std::vector<FactorySet> eligible_;
  std::vector<int> entry_begin_;
  std::vector<Entry> entries_;
  std::vector<int> entry_owner_;
  std::vector<int> entry_slot_;  // position of the entry in its cell list
  std::vector<std::vector<int>> cell_members_;  // entry indices per cell

  std::vector<std::vector<int>> members_;
  std::vector<int> member_slot_;
  std::unordered_map<OrderId, int> position_;
};

// Exact change of wmape_site for the move, as a rational.
// Throws InvalidInstance if an id is unknown or the move is infeasible.
Ratio SwapDelta(const DeviationState& state, const SwapMove& move);

// Samples a feasible swap uniformly-ish: random order, random other eligible
// factory, random eligible partner there. nullopt if none was found.
std::optional<std::pair<int, int>> RandomFeasibleSwap(
    const DeviationState& state, Rng& rng);

// Cells (i, j) with dev > 0 where recipe i has dev < 0 at some other
// factory; these are the cells whose mass counts toward site - global.
std::vector<std::pair<int, int>> MixedPositiveCells(
    const DeviationState& state);

// Targeted proposal: take a surplus cell (i, j), an order at j holding
// recipe i, a factory j' where recipe i is short, and a partner at j'.
// Falls back to a random feasible swap.
std::optional<std::pair<int, int>> ProposeTargetedSwap(
    const DeviationState& state, std::span<const std::pair<int, int>> cells,
    Rng& rng);

}  // namespace bap

#endif  // BAP_DEVIATION_STATE_H_
