#include "bap/deviation_state.h"

#include <algorithm>
#include <cstdlib>

#include <boost/container/small_vector.hpp>

namespace bap {
namespace {

struct CellChange {
  std::size_t cell;
  std::int64_t delta;
};

using ChangeList = boost::container::small_vector<CellChange, 24>;

void Accumulate(ChangeList& changes, std::size_t cell, std::int64_t delta) {
  for (CellChange& c : changes) {
    if (c.cell == cell) {
      c.delta += delta;
      return;
    }
  }
  changes.push_back({cell, delta});
}

}  // namespace

DeviationState::DeviationState(const DaySnapshot& day,
                               const RecipeSiteMatrix& prev,
                               std::span<const int> factory_index)
    : n_recipes_(day.n_recipes),
      n_factories_(day.n_factories),
      prev_(prev),
      dev_(static_cast<std::size_t>(day.n_recipes) * day.n_factories, 0),
      cell_members_(static_cast<std::size_t>(day.n_recipes) *
                    day.n_factories),
      members_(day.n_factories) {
  if (prev.n_recipes() != day.n_recipes ||
      prev.n_factories() != day.n_factories) {
    throw InvalidInstance("previous matrix shape does not match the day");
  }
  if (factory_index.size() != day.orders.size()) {
    throw InvalidInstance("assignment size does not match the day");
  }
  const std::size_t n = day.orders.size();
  ids_.reserve(n);
  factory_.assign(factory_index.begin(), factory_index.end());
  eligible_.reserve(n);
  entry_begin_.reserve(n + 1);
  member_slot_.resize(n);
  position_.reserve(n);

  std::vector<int> scratch;
  for (std::size_t p = 0; p < n; ++p) {
    const Order& o = day.orders[p];
    ids_.push_back(o.id);
    position_.emplace(o.id, static_cast<int>(p));
    eligible_.push_back(OrderEligibleFactories(o, day.eligibility));
    entry_begin_.push_back(static_cast<int>(entries_.size()));
    scratch.clear();
    for (RecipeId r : o.recipes) scratch.push_back(r.index());
    std::sort(scratch.begin(), scratch.end());
    for (std::size_t k = 0; k < scratch.size();) {
      std::size_t e = k;
      while (e < scratch.size() && scratch[e] == scratch[k]) ++e;
      entries_.push_back({scratch[k], static_cast<int>(e - k)});
      k = e;
    }
    denom_ += static_cast<std::int64_t>(o.recipes.size());
  }
  entry_begin_.push_back(static_cast<int>(entries_.size()));
  entry_owner_.resize(entries_.size());
  entry_slot_.resize(entries_.size());

  for (std::size_t p = 0; p < n; ++p) {
    const int j = factory_[p];
    member_slot_[p] = static_cast<int>(members_[j].size());
    members_[j].push_back(static_cast<int>(p));
    for (int k = entry_begin_[p]; k < entry_begin_[p + 1]; ++k) {
      entry_owner_[k] = static_cast<int>(p);
      dev_[CellIndex(entries_[k].recipe, j)] += entries_[k].mult;
      AddToCell(k, entries_[k].recipe, j);
    }
  }
  for (int i = 0; i < n_recipes_; ++i) {
    std::int64_t row = 0;
    for (int j = 0; j < n_factories_; ++j) {
      std::int64_t& d = dev_[CellIndex(i, j)];
      d -= prev.cell(i, j);
      abs_sum_ += std::llabs(d);
      row += d;
    }
    global_abs_sum_ += std::llabs(row);
  }
}

RecipeSiteMatrix DeviationState::Current() const {
  RecipeSiteMatrix m(n_recipes_, n_factories_);
  for (int i = 0; i < n_recipes_; ++i) {
    for (int j = 0; j < n_factories_; ++j) {
      m.cell(i, j) = prev_.cell(i, j) + dev(i, j);
    }
  }
  return m;
}

std::optional<int> DeviationState::PositionOf(OrderId id) const {
  auto it = position_.find(id);
  if (it == position_.end()) return std::nullopt;
  return it->second;
}

void DeviationState::AddToCell(int entry, int i, int j) {
  std::vector<int>& list = cell_members_[CellIndex(i, j)];
  entry_slot_[entry] = static_cast<int>(list.size());
  list.push_back(entry);
}

void DeviationState::RemoveFromCell(int entry, int i, int j) {
  std::vector<int>& list = cell_members_[CellIndex(i, j)];
  const int slot = entry_slot_[entry];
  const int last = list.back();
  list[slot] = last;
  entry_slot_[last] = slot;
  list.pop_back();
}

bool DeviationState::SwapFeasible(int a, int b) const {
  const int ja = factory_[a];
  const int jb = factory_[b];
  return ja != jb && eligible_[a].ContainsIndex(jb) &&
         eligible_[b].ContainsIndex(ja);
}

std::int64_t DeviationState::SwapDelta(int a, int b) const {
  const int ja = factory_[a];
  const int jb = factory_[b];
  ChangeList changes;
  for (const Entry& e : entries(a)) {
    Accumulate(changes, CellIndex(e.recipe, ja), -e.mult);
    Accumulate(changes, CellIndex(e.recipe, jb), e.mult);
  }
  for (const Entry& e : entries(b)) {
    Accumulate(changes, CellIndex(e.recipe, jb), -e.mult);
    Accumulate(changes, CellIndex(e.recipe, ja), e.mult);
  }
  std::int64_t delta = 0;
  for (const CellChange& c : changes) {
    const std::int64_t d = dev_[c.cell];
    delta += std::llabs(d + c.delta) - std::llabs(d);
  }
  return delta;
}

std::int64_t DeviationState::MoveDelta(int a, int to) const {
  const int from = factory_[a];
  std::int64_t delta = 0;
  for (const Entry& e : entries(a)) {
    const std::int64_t df = dev_[CellIndex(e.recipe, from)];
    const std::int64_t dt = dev_[CellIndex(e.recipe, to)];
    delta += std::llabs(df - e.mult) - std::llabs(df) + std::llabs(dt + e.mult) -
             std::llabs(dt);
  }
  return delta;
}

void DeviationState::ApplyMove(int a, int to) {
  const int from = factory_[a];
  if (from == to) return;
  for (int k = entry_begin_[a]; k < entry_begin_[a + 1]; ++k) {
    const Entry& e = entries_[k];
    std::int64_t& df = dev_[CellIndex(e.recipe, from)];
    std::int64_t& dt = dev_[CellIndex(e.recipe, to)];
    abs_sum_ -= std::llabs(df) + std::llabs(dt);
    df -= e.mult;
    dt += e.mult;
    abs_sum_ += std::llabs(df) + std::llabs(dt);
    RemoveFromCell(k, e.recipe, from);
    AddToCell(k, e.recipe, to);
  }
  // Factory membership lists.
  std::vector<int>& src = members_[from];
  const int slot = member_slot_[a];
  const int last = src.back();
  src[slot] = last;
  member_slot_[last] = slot;
  src.pop_back();
  member_slot_[a] = static_cast<int>(members_[to].size());
  members_[to].push_back(a);
  factory_[a] = to;
}

void DeviationState::ApplySwap(int a, int b) {
  const int ja = factory_[a];
  const int jb = factory_[b];
  ApplyMove(a, jb);
  ApplyMove(b, ja);
}

Ratio SwapDelta(const DeviationState& state, const SwapMove& move) {
  auto a = state.PositionOf(move.order_a);
  auto b = state.PositionOf(move.order_b);
  if (!a || !b) throw InvalidInstance("swap references an unknown order");
  if (!state.SwapFeasible(*a, *b)) {
    throw InvalidInstance("swap of orders " + std::to_string(move.order_a) +
                          " and " + std::to_string(move.order_b) +
                          " is infeasible");
  }
  return Ratio(state.SwapDelta(*a, *b), state.denom());
}

std::optional<std::pair<int, int>> RandomFeasibleSwap(
    const DeviationState& state, Rng& rng) {
  const int n = state.n_orders();
  if (n < 2) return std::nullopt;
  constexpr int kAttempts = 64;
  for (int attempt = 0; attempt < kAttempts; ++attempt) {
    const int a = static_cast<int>(rng.Index(n));
    const int ja = state.factory_of(a);
    int options[kMaxFactories];
    int n_options = 0;
    for (int j = 0; j < state.n_factories(); ++j) {
      if (j != ja && state.eligible(a).ContainsIndex(j) &&
          !state.members(j).empty()) {
        options[n_options++] = j;
      }
    }
    if (n_options == 0) continue;
    const int jb = options[rng.Index(n_options)];
    const auto pool = state.members(jb);
    for (int t = 0; t < 8; ++t) {
      const int b = pool[rng.Index(pool.size())];
      if (state.eligible(b).ContainsIndex(ja)) return std::make_pair(a, b);
    }
  }
  return std::nullopt;
}

std::vector<std::pair<int, int>> MixedPositiveCells(
    const DeviationState& state) {
  std::vector<std::pair<int, int>> cells;
  for (int i = 0; i < state.n_recipes(); ++i) {
    bool has_neg = false;
    for (int j = 0; j < state.n_factories(); ++j) {
      if (state.dev(i, j) < 0) has_neg = true;
    }
    if (!has_neg) continue;
    for (int j = 0; j < state.n_factories(); ++j) {
      if (state.dev(i, j) > 0) cells.emplace_back(i, j);
    }
  }
  return cells;
}

std::optional<std::pair<int, int>> ProposeTargetedSwap(
    const DeviationState& state, std::span<const std::pair<int, int>> cells,
    Rng& rng) {
  if (!cells.empty()) {
    const auto [i, j] = cells[rng.Index(cells.size())];
    if (state.cell_size(i, j) > 0) {
      const int a = state.cell_member(i, j, static_cast<int>(rng.Index(
                                                state.cell_size(i, j))));
      int short_targets[kMaxFactories];
      int n_short = 0;
      int other_targets[kMaxFactories];
      int n_other = 0;
      for (int t = 0; t < state.n_factories(); ++t) {
        if (t == j || !state.eligible(a).ContainsIndex(t) ||
            state.members(t).empty()) {
          continue;
        }
        if (state.dev(i, t) < 0) {
          short_targets[n_short++] = t;
        } else {
          other_targets[n_other++] = t;
        }
      }
      int target = -1;
      if (n_short > 0) {
        target = short_targets[rng.Index(n_short)];
      } else if (n_other > 0) {
        target = other_targets[rng.Index(n_other)];
      }
      if (target >= 0) {
        const auto pool = state.members(target);
        for (int t = 0; t < 16; ++t) {
          const int b = pool[rng.Index(pool.size())];
          if (state.eligible(b).ContainsIndex(j)) return std::make_pair(a, b);
        }
      }
    }
  }
  return RandomFeasibleSwap(state, rng);
}

}  // namespace bap
