#include "bap/exact.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <map>
#include <numeric>
#include <string>

#include "bap/deviation_state.h"
#include "bap/generator.h"
#include "bap/random.h"

namespace bap {
namespace {

using Clock = std::chrono::steady_clock;

double SecondsSince(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::int64_t Dist(std::int64_t p, std::int64_t lo, std::int64_t hi) {
  if (p < lo) return lo - p;
  if (p > hi) return p - hi;
  return 0;
}

// Range bound of one recipe row: lo/hi are per-factory unit ranges, total is
// the fixed row sum.
std::int64_t RowBound(const std::int64_t* prev, const std::int64_t* lo,
                      const std::int64_t* hi, std::int64_t total, int m) {
  std::int64_t cost = 0;
  std::int64_t clamped = 0;
  for (int j = 0; j < m; ++j) {
    cost += Dist(prev[j], lo[j], hi[j]);
    clamped += std::clamp(prev[j], lo[j], hi[j]);
  }
  return cost + std::llabs(total - clamped);
}

// ---------------------------------------------------------------------------
// Primal phase: steepest descent over swaps and 3-cycles, with kicks.

struct Candidate {
  std::int64_t delta;
  int pos;
};

void TopMoves(const DeviationState& s, int from, int to, std::size_t k,
              std::vector<Candidate>& out) {
  out.clear();
  for (int a : s.members(from)) {
    if (s.eligible(a).ContainsIndex(to)) out.push_back({s.MoveDelta(a, to), a});
  }
  auto cmp = [](const Candidate& x, const Candidate& y) {
    return x.delta != y.delta ? x.delta < y.delta : x.pos < y.pos;
  };
  if (out.size() > k) {
    std::partial_sort(out.begin(), out.begin() + k, out.end(), cmp);
    out.resize(k);
  } else {
    std::sort(out.begin(), out.end(), cmp);
  }
}

// One improving swap (best over the top-k half moves of every factory pair).
bool SwapStep(DeviationState& s, std::size_t k) {
  const int m = s.n_factories();
  std::vector<Candidate> ca, cb;
  std::int64_t best = 0;
  int best_a = -1, best_b = -1;
  for (int ja = 0; ja < m; ++ja) {
    for (int jb = ja + 1; jb < m; ++jb) {
      TopMoves(s, ja, jb, k, ca);
      if (ca.empty()) continue;
      TopMoves(s, jb, ja, k, cb);
      for (const Candidate& x : ca) {
        for (const Candidate& y : cb) {
          const std::int64_t d = s.SwapDelta(x.pos, y.pos);
          if (d < best) {
            best = d;
            best_a = x.pos;
            best_b = y.pos;
          }
        }
      }
    }
  }
  if (best_a < 0) return false;
  s.ApplySwap(best_a, best_b);
  return true;
}

// One improving rotation a: j1 -> j2, b: j2 -> j3, c: j3 -> j1.
bool CycleStep(DeviationState& s, std::size_t k) {
  const int m = s.n_factories();
  if (m < 3) return false;
  std::vector<Candidate> ca, cb, cc;
  for (int j1 = 0; j1 < m; ++j1) {
    for (int j2 = 0; j2 < m; ++j2) {
      for (int j3 = 0; j3 < m; ++j3) {
        if (j1 == j2 || j2 == j3 || j1 == j3) continue;
        TopMoves(s, j1, j2, k, ca);
        TopMoves(s, j2, j3, k, cb);
        TopMoves(s, j3, j1, k, cc);
        if (ca.empty() || cb.empty() || cc.empty()) continue;
        const std::int64_t base = s.abs_sum();
        for (const Candidate& x : ca) {
          s.ApplyMove(x.pos, j2);
          for (const Candidate& y : cb) {
            s.ApplyMove(y.pos, j3);
            for (const Candidate& z : cc) {
              if (s.abs_sum() + s.MoveDelta(z.pos, j1) < base) {
                s.ApplyMove(z.pos, j1);
                return true;
              }
            }
            s.ApplyMove(y.pos, j2);
          }
          s.ApplyMove(x.pos, j1);
        }
      }
    }
  }
  return false;
}

void Descend(DeviationState& s, std::int64_t target, Clock::time_point deadline,
             std::int64_t& steps) {
  while (s.abs_sum() > target && Clock::now() < deadline) {
    if (SwapStep(s, 8) || CycleStep(s, 6) || SwapStep(s, 40)) {
      ++steps;
      continue;
    }
    break;
  }
}

// Iterated descent: kick with a few random swaps, descend, keep the result
// if it is not worse. Returns the best positions found.
std::vector<int> Polish(const DaySnapshot& day, const RecipeSiteMatrix& prev,
                        std::vector<int> start, std::int64_t target,
                        int stall_rounds, std::uint64_t seed,
                        Clock::time_point deadline, std::int64_t& steps) {
  DeviationState s(day, prev, start);
  Descend(s, target, deadline, steps);
  std::int64_t best_abs = s.abs_sum();
  std::vector<int> best = s.factories();
  Rng rng(DeriveSeed(seed, "polish"));
  int stall = 0;
  while (best_abs > target && stall < stall_rounds &&
         Clock::now() < deadline) {
    const int kicks = 2 + static_cast<int>(rng.Index(6));
    for (int t = 0; t < kicks; ++t) {
      const auto cells = MixedPositiveCells(s);
      if (auto mv = ProposeTargetedSwap(s, cells, rng)) {
        s.ApplySwap(mv->first, mv->second);
      }
    }
    Descend(s, target, deadline, steps);
    if (s.abs_sum() < best_abs) {
      best_abs = s.abs_sum();
      best = s.factories();
      stall = 0;
    } else if (s.abs_sum() == best_abs) {
      best = s.factories();
      ++stall;
    } else {
      s = DeviationState(day, prev, best);
      ++stall;
    }
  }
  return best;
}

// ---------------------------------------------------------------------------
// Tree search over class counts.

// Per-factory count range of each class implied by eligibility and exact
// capacities. Ranges are first computed per eligible set with max-flow
// feasibility tests and then spread over the classes of that set.
struct ClassRanges {
  std::vector<std::vector<std::int64_t>> lo;
  std::vector<std::vector<std::int64_t>> hi;
};

ClassRanges ComputeClassRanges(const DaySnapshot& day,
                               const std::vector<OrderClass>& classes) {
  const int m = day.n_factories;
  const int nb = m - 1;
  std::vector<std::int64_t> caps(nb);
  for (int j = 0; j < nb; ++j) caps[j] = *day.capacities.at(FactoryId{j + 1});
  std::map<std::uint32_t, std::int64_t> set_count;
  for (const OrderClass& c : classes) set_count[c.eligible.bits()] += c.count();
  std::vector<EligibleSupply> base;
  for (const auto& [bits, n] : set_count) base.push_back({FactorySet(bits), n});

  // Largest v in [0, limit] with pred(v) true, pred monotone decreasing and
  // pred(0) assumed true.
  auto largest = [](std::int64_t limit, const auto& pred) {
    std::int64_t lo = 0, hi = limit;
    while (lo < hi) {
      const std::int64_t mid = lo + (hi - lo + 1) / 2;
      if (pred(mid)) {
        lo = mid;
      } else {
        hi = mid - 1;
      }
    }
    return lo;
  };

  std::map<std::uint32_t, std::pair<std::vector<std::int64_t>,
                                    std::vector<std::int64_t>>> set_range;
  for (const auto& [bits, n] : set_count) {
    std::vector<std::int64_t> lo(m, 0), hi(m, 0);
    const FactorySet set(bits);
    auto supply_with = [&](std::int64_t delta, std::uint32_t extra_bits,
                           std::int64_t extra) {
      std::vector<EligibleSupply> s = base;
      for (EligibleSupply& e : s) {
        if (e.factories.bits() == bits) e.count += delta;
      }
      if (extra > 0) s.push_back({FactorySet(extra_bits), extra});
      return s;
    };
    for (int j = 0; j < m; ++j) {
      if (!set.ContainsIndex(j)) continue;
      // At least v orders of the set at j.
      hi[j] = largest(n, [&](std::int64_t v) {
        std::vector<std::int64_t> rem = caps;
        if (j < nb) {
          rem[j] -= v;
          if (rem[j] < 0) return false;
        }
        return CapacityFeasible(supply_with(-v, 0, 0), rem);
      });
      if (j < nb) {
        // w orders of the set forced to avoid j.
        const std::uint32_t without = bits & ~(1u << j);
        const std::int64_t most_elsewhere = largest(n, [&](std::int64_t w) {
          return CapacityFeasible(supply_with(-w, without, w), caps);
        });
        lo[j] = n - most_elsewhere;
      }
    }
    if (set.ContainsIndex(nb)) {
      std::int64_t bounded_max = 0;
      for (int j = 0; j < nb; ++j) bounded_max += hi[j];
      lo[nb] = std::max<std::int64_t>(0, n - bounded_max);
    }
    set_range[bits] = {std::move(lo), std::move(hi)};
  }

  ClassRanges out;
  out.lo.assign(classes.size(), std::vector<std::int64_t>(m, 0));
  out.hi.assign(classes.size(), std::vector<std::int64_t>(m, 0));
  for (std::size_t c = 0; c < classes.size(); ++c) {
    const std::uint32_t bits = classes[c].eligible.bits();
    const auto& [lo, hi] = set_range.at(bits);
    const std::int64_t n = set_count.at(bits);
    const std::int64_t k = classes[c].count();
    for (int j = 0; j < m; ++j) {
      out.hi[c][j] = std::min(k, hi[j]);
      out.lo[c][j] = std::max<std::int64_t>(0, lo[j] - (n - k));
    }
  }
  return out;
}

std::vector<std::pair<int, int>> Entries(const OrderClass& c) {
  std::vector<std::pair<int, int>> entries;
  for (std::size_t k = 0; k < c.recipes.size();) {
    std::size_t e = k;
    while (e < c.recipes.size() && c.recipes[e] == c.recipes[k]) ++e;
    entries.emplace_back(c.recipes[k].index(), static_cast<int>(e - k));
    k = e;
  }
  return entries;
}

std::int64_t BoundFromRanges(const DaySnapshot& day,
                             const RecipeSiteMatrix& prev,
                             const std::vector<OrderClass>& classes,
                             const ClassRanges& ranges) {
  const int n = day.n_recipes;
  const int m = day.n_factories;
  std::vector<std::int64_t> lo(static_cast<std::size_t>(n) * m, 0);
  std::vector<std::int64_t> hi(lo.size(), 0);
  std::vector<std::int64_t> total(n, 0);
  for (std::size_t c = 0; c < classes.size(); ++c) {
    for (const auto& [i, mult] : Entries(classes[c])) {
      total[i] += mult * classes[c].count();
      for (int j = 0; j < m; ++j) {
        lo[static_cast<std::size_t>(i) * m + j] += mult * ranges.lo[c][j];
        hi[static_cast<std::size_t>(i) * m + j] += mult * ranges.hi[c][j];
      }
    }
  }
  std::int64_t bound = 0;
  std::vector<std::int64_t> p(m);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < m; ++j) p[j] = prev.cell(i, j);
    const std::size_t row = static_cast<std::size_t>(i) * m;
    bound += RowBound(p.data(), lo.data() + row, hi.data() + row, total[i], m);
  }
  return bound;
}

struct ClassData {
  std::vector<std::pair<int, int>> entries;  // (recipe index, multiplicity)
  FactorySet eligible;
  std::int64_t count = 0;
  std::vector<std::int64_t> lo;  // per factory range
  std::vector<std::int64_t> hi;
};

struct Child {
  std::vector<std::int64_t> y;  // per factory
  std::int64_t bound = 0;
};

// Depth-first search over the class-count vectors of the classes whose
// range leaves a choice. Rows keep committed units, the lower end of the
// pending classes' ranges, and the pending slack above it.
class TreeSearch {
 public:
  TreeSearch(const DaySnapshot& day, const RecipeSiteMatrix& prev,
             const std::vector<OrderClass>& classes, const ClassRanges& ranges)
      : n_(day.n_recipes), m_(day.n_factories), prev_(prev) {
    const std::size_t cells = static_cast<std::size_t>(n_) * m_;
    fixed_.assign(cells, 0);
    pending_lo_.assign(cells, 0);
    slack_.assign(cells, 0);
    row_total_.assign(n_, 0);
    cap_.assign(m_, -1);
    used_.assign(m_, 0);
    avail_.assign(m_, 0);
    for (int j = 0; j + 1 < m_; ++j) {
      cap_[j] = *day.capacities.at(FactoryId{j + 1});
    }

    y_.assign(classes.size(), std::vector<std::int64_t>(m_, 0));
    data_.reserve(classes.size());
    for (std::size_t c = 0; c < classes.size(); ++c) {
      ClassData d;
      d.eligible = classes[c].eligible;
      d.count = classes[c].count();
      d.entries = Entries(classes[c]);
      d.lo = ranges.lo[c];
      d.hi = ranges.hi[c];
      for (const auto& [i, mult] : d.entries) row_total_[i] += mult * d.count;
      if (d.lo == d.hi) {
        for (int j = 0; j < m_; ++j) {
          y_[c][j] = d.lo[j];
          used_[j] += d.lo[j];
          for (const auto& [i, mult] : d.entries) {
            fixed_[Cell(i, j)] += mult * d.lo[j];
          }
        }
      } else {
        order_.push_back(static_cast<int>(c));
        for (int j = 0; j < m_; ++j) {
          if (d.hi[j] > 0) avail_[j] += d.count;
          for (const auto& [i, mult] : d.entries) {
            pending_lo_[Cell(i, j)] += mult * d.lo[j];
            slack_[Cell(i, j)] += mult * (d.hi[j] - d.lo[j]);
          }
        }
      }
      data_.push_back(std::move(d));
    }
    // Heaviest classes first.
    std::stable_sort(order_.begin(), order_.end(), [&](int a, int b) {
      return Weight(a) > Weight(b);
    });
    row_bound_.assign(n_, 0);
    bound_ = 0;
    for (int i = 0; i < n_; ++i) {
      row_bound_[i] = ComputeRow(i);
      bound_ += row_bound_[i];
    }
  }

  std::int64_t bound() const { return bound_; }

  // Runs until the tree is exhausted, the incumbent meets `stop_at`, or the
  // deadline passes. Returns true if the tree was exhausted.
  bool Run(std::int64_t& incumbent, std::int64_t stop_at,
           Clock::time_point deadline, std::int64_t& nodes,
           std::vector<std::vector<std::int64_t>>& best_y) {
    if (order_.empty()) {
      if (bound_ < incumbent && SupplyOk()) {
        incumbent = bound_;
        best_y = y_;
      }
      return true;
    }
    struct Frame {
      std::size_t depth;
      std::vector<Child> children;
      std::size_t next = 0;
      bool applied = false;
    };
    std::vector<Frame> stack;
    stack.push_back({0, Children(0), 0, false});
    while (!stack.empty()) {
      Frame& top = stack.back();
      const int c = order_[top.depth];
      if (top.applied) {
        Undo(c, top.children[top.next - 1].y);
        top.applied = false;
      }
      if ((nodes & 255) == 0 && Clock::now() >= deadline) return false;
      if (incumbent <= stop_at) return false;
      if (top.next == top.children.size() ||
          top.children[top.next].bound >= incumbent) {
        stack.pop_back();
        continue;
      }
      const Child& child = top.children[top.next++];
      Apply(c, child.y);
      top.applied = true;
      ++nodes;
      if (bound_ >= incumbent || !SupplyOk()) continue;
      const std::size_t depth = top.depth + 1;
      if (depth == order_.size()) {
        incumbent = bound_;
        best_y = y_;
        continue;
      }
      stack.push_back({depth, Children(depth), 0, false});
    }
    return true;
  }

 private:
  std::size_t Cell(int i, int j) const {
    return static_cast<std::size_t>(i) * m_ + j;
  }

  std::int64_t Weight(int c) const {
    std::int64_t units = 0;
    for (const auto& e : data_[c].entries) units += e.second;
    return units * data_[c].count;
  }

  std::int64_t ComputeRow(int i) const {
    std::int64_t lo[kMaxFactories], hi[kMaxFactories], p[kMaxFactories];
    for (int j = 0; j < m_; ++j) {
      lo[j] = fixed_[Cell(i, j)] + pending_lo_[Cell(i, j)];
      hi[j] = lo[j] + slack_[Cell(i, j)];
      p[j] = prev_.cell(i, j);
    }
    return RowBound(p, lo, hi, row_total_[i], m_);
  }

  bool SupplyOk() const {
    for (int j = 0; j + 1 < m_; ++j) {
      if (used_[j] > cap_[j] || used_[j] + avail_[j] < cap_[j]) return false;
    }
    return true;
  }

  void Apply(int c, const std::vector<std::int64_t>& y) { Shift(c, y, +1); }
  void Undo(int c, const std::vector<std::int64_t>& y) { Shift(c, y, -1); }

  void Shift(int c, const std::vector<std::int64_t>& y, int sign) {
    const ClassData& d = data_[c];
    for (int j = 0; j < m_; ++j) {
      used_[j] += sign * y[j];
      if (d.hi[j] > 0) avail_[j] -= sign * d.count;
      y_[c][j] = sign > 0 ? y[j] : 0;
      for (const auto& [i, mult] : d.entries) {
        fixed_[Cell(i, j)] += sign * mult * y[j];
        pending_lo_[Cell(i, j)] -= sign * mult * d.lo[j];
        slack_[Cell(i, j)] -= sign * mult * (d.hi[j] - d.lo[j]);
      }
    }
    for (const auto& [i, mult] : d.entries) {
      bound_ -= row_bound_[i];
      row_bound_[i] = ComputeRow(i);
      bound_ += row_bound_[i];
    }
  }

  std::vector<Child> Children(std::size_t depth) {
    const int c = order_[depth];
    const ClassData& d = data_[c];
    std::vector<int> slots;
    for (int j = 0; j < m_; ++j) {
      if (d.hi[j] > 0) slots.push_back(j);
    }
    std::vector<Child> out;
    std::vector<std::int64_t> y(m_, 0);
    // Compositions of the class count over its slots; the last slot takes
    // the remainder.
    auto rec = [&](auto&& self, std::size_t k, std::int64_t left) -> void {
      const int j = slots[k];
      if (k + 1 == slots.size()) {
        if (left < d.lo[j] || left > d.hi[j]) return;
        if (cap_[j] >= 0 && used_[j] + left > cap_[j]) return;
        y[j] = left;
        Apply(c, y);
        out.push_back({y, bound_});
        Undo(c, y);
        y[j] = 0;
        return;
      }
      std::int64_t top = std::min(left, d.hi[j]);
      if (cap_[j] >= 0) top = std::min(top, cap_[j] - used_[j]);
      for (std::int64_t v = top; v >= d.lo[j]; --v) {
        y[j] = v;
        self(self, k + 1, left - v);
      }
      y[j] = 0;
    };
    rec(rec, 0, d.count);
    std::stable_sort(out.begin(), out.end(), [](const Child& a, const Child& b) {
      return a.bound < b.bound;
    });
    return out;
  }

  int n_;
  int m_;
  const RecipeSiteMatrix& prev_;
  std::vector<ClassData> data_;
  std::vector<int> order_;  // branching order over undecided classes
  std::vector<std::int64_t> fixed_;
  std::vector<std::int64_t> pending_lo_;
  std::vector<std::int64_t> slack_;
  std::vector<std::int64_t> row_total_;
  std::vector<std::int64_t> row_bound_;
  std::int64_t bound_ = 0;
  std::vector<std::int64_t> cap_;  // -1 for the catch-all
  std::vector<std::int64_t> used_;
  std::vector<std::int64_t> avail_;
  std::vector<std::vector<std::int64_t>> y_;
};

std::vector<std::vector<std::int64_t>> ClassCounts(
    const DaySnapshot& day, const std::vector<OrderClass>& classes,
    const Allocation& alloc) {
  std::vector<std::vector<std::int64_t>> y(
      classes.size(), std::vector<std::int64_t>(day.n_factories, 0));
  for (std::size_t c = 0; c < classes.size(); ++c) {
    for (OrderId id : classes[c].member_ids) {
      y[c][alloc.assignments.at(id).index()]++;
    }
  }
  return y;
}

// Turns class counts back into an order allocation. Members keep their
// hinted factory where the counts allow; the rest fill remaining slots in
// factory order, members taken by ascending id.
Allocation Disaggregate(const DaySnapshot& day,
                        const std::vector<OrderClass>& classes,
                        const std::vector<std::vector<std::int64_t>>& y,
                        const Allocation* hint) {
  Allocation out;
  out.lead_day = day.lead_day;
  for (std::size_t c = 0; c < classes.size(); ++c) {
    std::vector<std::int64_t> left = y[c];
    std::vector<OrderId> pending;
    for (OrderId id : classes[c].member_ids) {
      if (hint != nullptr) {
        auto it = hint->assignments.find(id);
        if (it != hint->assignments.end()) {
          const int j = it->second.index();
          if (j >= 0 && j < day.n_factories && left[j] > 0) {
            left[j]--;
            out.assignments[id] = it->second;
            continue;
          }
        }
      }
      pending.push_back(id);
    }
    int j = 0;
    for (OrderId id : pending) {
      while (left[j] == 0) ++j;
      left[j]--;
      out.assignments[id] = FactoryId{j + 1};
    }
  }
  return out;
}

}  // namespace

std::vector<OrderClass> ClassAggregate(const DaySnapshot& day) {
  CheckSnapshot(day);
  std::map<std::pair<std::vector<RecipeId>, std::uint32_t>, std::size_t> index;
  std::vector<OrderClass> classes;
  std::vector<const Order*> sorted;
  sorted.reserve(day.orders.size());
  for (const Order& o : day.orders) sorted.push_back(&o);
  std::sort(sorted.begin(), sorted.end(),
            [](const Order* a, const Order* b) { return a->id < b->id; });
  for (const Order* o : sorted) {
    std::vector<RecipeId> key = o->recipes;
    std::sort(key.begin(), key.end());
    const FactorySet elig = OrderEligibleFactories(*o, day.eligibility);
    auto [it, inserted] =
        index.try_emplace({key, elig.bits()}, classes.size());
    if (inserted) classes.push_back({std::move(key), elig, {}});
    classes[it->second].member_ids.push_back(o->id);
  }
  return classes;
}

std::int64_t RangeLowerBound(const DaySnapshot& day,
                             const RecipeSiteMatrix& prev) {
  CheckSnapshot(day);
  if (prev.n_recipes() != day.n_recipes ||
      prev.n_factories() != day.n_factories) {
    throw InvalidInstance("previous matrix shape does not match the day");
  }
  if (!CapacityFeasible(day)) {
    throw Infeasible("no allocation fills every bounded factory exactly");
  }
  const std::vector<OrderClass> classes = ClassAggregate(day);
  return BoundFromRanges(day, prev, classes,
                         ComputeClassRanges(day, classes));
}

SolveResult ExactSolve(const DaySnapshot& day, const RecipeSiteMatrix& prev,
                       const ExactOptions& options) {
  if (!(options.budget_seconds > 0.0)) {
    throw InvalidConfig("exact solver budget must be positive");
  }
  const auto start = Clock::now();
  const auto deadline =
      start + std::chrono::duration_cast<Clock::duration>(
                  std::chrono::duration<double>(options.budget_seconds));
  CheckSnapshot(day);
  if (!CapacityFeasible(day)) {
    throw Infeasible("no allocation fills every bounded factory exactly");
  }
  if (prev.n_recipes() != day.n_recipes ||
      prev.n_factories() != day.n_factories) {
    throw InvalidInstance("previous matrix shape does not match the day");
  }
  const std::vector<OrderClass> classes = ClassAggregate(day);
  const ClassRanges ranges = ComputeClassRanges(day, classes);
  const std::int64_t root = BoundFromRanges(day, prev, classes, ranges);

  SolveResult result;
  // Incumbent.
  Allocation incumbent_alloc;
  if (options.warm_start) {
    ValidationReport report = ValidateAllocation(day, *options.warm_start);
    if (!report.ok()) throw ValidationError(std::move(report));
    incumbent_alloc = *options.warm_start;
  } else {
    incumbent_alloc = GreedyConstruct(day);
    SolveResult tabu =
        TabuImprove(day, incumbent_alloc, prev, options.warm_tabu);
    incumbent_alloc = tabu.allocation;
    result.swaps_accepted += tabu.swaps_accepted;
    result.iterations += tabu.iterations;
  }
  std::int64_t steps = 0;
  const std::vector<int> polished =
      Polish(day, prev, PositionsFromAllocation(day, incumbent_alloc), root,
             options.polish_stall_rounds, options.warm_tabu.seed, deadline,
             steps);
  result.swaps_accepted += steps;
  incumbent_alloc = AllocationFromPositions(day, polished);
  std::int64_t incumbent =
      SiteDeviation(prev, BuildRecipeSiteMatrix(day, polished));

  std::vector<std::vector<std::int64_t>> best_y =
      ClassCounts(day, classes, incumbent_alloc);
  SolveStatus status;
  if (incumbent <= root) {
    status = SolveStatus::kOptimalExhausted;
    result.lower_bound_numerator = root;
  } else {
    TreeSearch tree(day, prev, classes, ranges);
    const bool exhausted = tree.Run(incumbent, root, deadline,
                                    result.nodes_explored, best_y);
    if (incumbent <= root) {
      status = SolveStatus::kOptimalExhausted;
      result.lower_bound_numerator = root;
    } else if (exhausted) {
      status = SolveStatus::kOptimalExhausted;
      result.lower_bound_numerator = incumbent;
    } else {
      status = SolveStatus::kFeasibleBudgetHit;
    }
  }
  const Allocation* hint = options.id_hint ? &*options.id_hint : nullptr;
  result.allocation = Disaggregate(day, classes, best_y, hint);
  FinalizeObjectives(day, prev, result);
  // Certified means the global bound itself is met; an optimum proven by
  // the range bound or by exhausting the tree is reported as exhausted.
  if (result.objective_site == result.objective_global) {
    result.status = SolveStatus::kOptimalCertified;
    result.lower_bound_numerator = incumbent;
  } else {
    result.status = status;
  }
  result.elapsed_seconds = SecondsSince(start);
  return result;
}

SolveResult BruteForceOracle(const DaySnapshot& day,
                             const RecipeSiteMatrix& prev) {
  CheckSnapshot(day);
  const std::size_t k = day.orders.size();
  const double bits = static_cast<double>(k) * std::log2(day.n_factories);
  if (bits > 20.0 + 1e-9) {
    throw InstanceTooLarge("brute force needs m^k <= 2^20 assignments; got " +
                           std::to_string(k) + " orders over " +
                           std::to_string(day.n_factories) + " factories");
  }
  const auto start = Clock::now();
  const int m = day.n_factories;
  std::vector<std::vector<int>> options(k);
  for (std::size_t p = 0; p < k; ++p) {
    const FactorySet elig =
        OrderEligibleFactories(day.orders[p], day.eligibility);
    for (int j = 0; j < m; ++j) {
      if (elig.ContainsIndex(j)) options[p].push_back(j);
    }
  }
  std::vector<std::int64_t> cap(m, -1);
  for (int j = 0; j + 1 < m; ++j) cap[j] = *day.capacities.at(FactoryId{j + 1});

  // Odometer over all eligible assignments; first optimum found wins ties.
  std::vector<std::size_t> digit(k, 0);
  std::vector<int> assign(k);
  std::vector<int> best;
  std::int64_t best_abs = -1;
  std::int64_t nodes = 0;
  while (true) {
    ++nodes;
    std::vector<std::int64_t> used(m, 0);
    for (std::size_t p = 0; p < k; ++p) {
      assign[p] = options[p][digit[p]];
      used[assign[p]]++;
    }
    bool ok = true;
    for (int j = 0; j + 1 < m; ++j) ok = ok && used[j] == cap[j];
    if (ok) {
      const std::int64_t abs =
          SiteDeviation(prev, BuildRecipeSiteMatrix(day, assign));
      if (best_abs < 0 || abs < best_abs) {
        best_abs = abs;
        best = assign;
      }
    }
    std::size_t p = 0;
    while (p < k && ++digit[p] == options[p].size()) digit[p++] = 0;
    if (p == k) break;
  }
  if (best_abs < 0) {
    throw Infeasible("no allocation fills every bounded factory exactly");
  }
  SolveResult result;
  result.allocation = AllocationFromPositions(day, best);
  result.nodes_explored = nodes;
  FinalizeObjectives(day, prev, result);
  result.status = SolveStatus::kOptimalExhausted;
  if (result.objective_site == result.objective_global) {
    result.status = SolveStatus::kOptimalCertified;
  }
  result.elapsed_seconds = SecondsSince(start);
  return result;
}

}  // namespace bap
