#include "bap/simulator.h"

#include <algorithm>
#include <set>

#include <fmt/format.h>

#include "bap/exact.h"
#include "bap/random.h"

namespace bap {
namespace {

constexpr int kFinalLeadDay = -3;

std::uint64_t Fnv1a(std::uint64_t h, std::int64_t v) {
  for (int k = 0; k < 8; ++k) {
    h ^= static_cast<std::uint64_t>(v >> (8 * k)) & 0xffu;
    h *= 0x100000001b3ULL;
  }
  return h;
}

struct Solved {
  Allocation allocation;
  SolveStatus status = SolveStatus::kFeasibleBudgetHit;
  double elapsed = 0.0;
  std::int64_t nodes = 0;
  std::optional<std::int64_t> lower_bound;
};

Solved Plain(Allocation a) {
  Solved s;
  s.allocation = std::move(a);
  return s;
}

Solved FromResult(SolveResult r) {
  return {std::move(r.allocation), r.status, r.elapsed_seconds,
          r.nodes_explored, r.lower_bound_numerator};
}

Solved SolveDay(const ScenarioConfig& config, const DaySnapshot& day,
                const DayRecord& prev) {
  const std::uint64_t seed =
      DeriveSeed(config.generator.seed, "solve", static_cast<std::uint64_t>(
                                                     -day.lead_day));
  switch (config.solver) {
    case SolverKind::kGreedy:
      return Plain(GreedyConstruct(day));
    case SolverKind::kIdBased:
      return Plain(IdBasedAllocate(day, prev.allocation, prev.snapshot));
    case SolverKind::kItps: {
      ItpsParams params = config.itps;
      params.seed = seed;
      return FromResult(
          ItpsImprove(day, GreedyConstruct(day), prev.matrix, params));
    }
    case SolverKind::kTabu: {
      TabuParams params = config.tabu;
      params.seed = seed;
      return FromResult(
          TabuImprove(day, GreedyConstruct(day), prev.matrix, params));
    }
    case SolverKind::kExact: {
      ExactOptions options;
      options.budget_seconds = config.budget_seconds;
      options.warm_start = IdBasedAllocate(day, prev.allocation, prev.snapshot);
      options.id_hint = prev.allocation;
      options.warm_tabu = config.tabu;
      options.warm_tabu.seed = seed;
      return FromResult(ExactSolve(day, prev.matrix, options));
    }
  }
  throw InvalidConfig("unknown solver");
}

}  // namespace

const char* SolverName(SolverKind kind) {
  switch (kind) {
    case SolverKind::kExact:
      return "exact";
    case SolverKind::kGreedy:
      return "greedy";
    case SolverKind::kItps:
      return "itps";
    case SolverKind::kTabu:
      return "tabu";
    case SolverKind::kIdBased:
      return "id_based";
  }
  return "?";
}

SolverKind SolverFromName(const std::string& name) {
  for (SolverKind k : {SolverKind::kExact, SolverKind::kGreedy,
                       SolverKind::kItps, SolverKind::kTabu,
                       SolverKind::kIdBased}) {
    if (name == SolverName(k)) return k;
  }
  throw InvalidConfig("unknown solver '" + name + "'");
}

std::vector<int> DefaultHorizonDays() {
  std::vector<int> days;
  for (int ld = -18; ld <= kFinalLeadDay; ++ld) days.push_back(ld);
  return days;
}

void ScenarioConfig::Validate() const {
  generator.Validate();
  if (days.empty()) throw InvalidConfig("scenario has no days");
  for (std::size_t k = 1; k < days.size(); ++k) {
    if (days[k] != days[k - 1] + 1) {
      throw InvalidConfig("scenario days must be contiguous and ascending");
    }
  }
  for (const auto& [ld, caps] : capacity_overrides) {
    if (ld < days.front() || ld > days.back()) {
      throw InvalidConfig("capacity override on LD" + std::to_string(-ld) +
                          " is outside the horizon");
    }
    for (const auto& [factory, cap] : caps) {
      if (factory < 1 || factory >= generator.n_factories()) {
        throw InvalidConfig("capacity override names F" +
                            std::to_string(factory) +
                            ", which is not a bounded factory");
      }
      if (cap < 0) throw InvalidConfig("capacity override is negative");
    }
  }
  if (churn) churn->Validate();
  if (!(budget_seconds > 0.0)) throw InvalidConfig("budget must be positive");
  tabu.Validate();
  if (itps.iterations <= 0) throw InvalidConfig("ITPS iterations must be positive");
}

HorizonResult RunHorizon(const ScenarioConfig& config) {
  config.Validate();
  HorizonResult result;
  result.config = config;
  for (std::size_t k = 0; k < config.days.size(); ++k) {
    const int ld = config.days[k];
    DayRecord rec;
    rec.lead_day = ld;
    try {
      if (k == 0) {
        rec.snapshot =
            GenerateDay(config.generator, ld, config.capacity_overrides);
        rec.allocation = GreedyConstruct(rec.snapshot);
      } else {
        const DayRecord& prev = result.days.back();
        rec.snapshot = EvolveDay(prev.snapshot, config.generator, ld,
                                 config.capacity_overrides);
        if (config.churn) {
          rec.snapshot = ApplyChurn(
              rec.snapshot, *config.churn, config.generator,
              DeriveSeed(config.generator.seed, "churn",
                         static_cast<std::uint64_t>(-ld)));
        }
        Solved s = SolveDay(config, rec.snapshot, prev);
        rec.allocation = std::move(s.allocation);
        rec.status = s.status;
        rec.elapsed_seconds = s.elapsed;
        rec.nodes_explored = s.nodes;
        rec.lower_bound_numerator = s.lower_bound;
      }
    } catch (const Infeasible& e) {
      throw Infeasible("LD" + std::to_string(-ld) + ": " + e.what());
    } catch (const InvalidConfig& e) {
      throw InvalidConfig("LD" + std::to_string(-ld) + ": " + e.what());
    }
    rec.matrix = BuildRecipeSiteMatrix(rec.snapshot, rec.allocation);
    const RecipeSiteMatrix& reference =
        k == 0 ? rec.matrix : result.days.back().matrix;
    rec.vs_previous = ComputeWmapePair(reference, rec.matrix);
    if (k == 0 || (config.solver != SolverKind::kExact &&
                   config.solver != SolverKind::kItps &&
                   config.solver != SolverKind::kTabu)) {
      rec.status = rec.vs_previous.site == rec.vs_previous.global
                       ? SolveStatus::kOptimalCertified
                       : SolveStatus::kFeasibleBudgetHit;
    }
    rec.digest = SnapshotDigest(rec.snapshot);
    std::int64_t real = 0;
    for (const Order& o : rec.snapshot.orders) real += o.is_real ? 1 : 0;
    rec.real_fraction = static_cast<double>(real) /
                        static_cast<double>(rec.snapshot.orders.size());
    result.days.push_back(std::move(rec));
  }
  if (result.days.size() > 1 && result.days.back().lead_day == kFinalLeadDay) {
    result.retrospective = RetrospectiveCompare(result);
    result.area_site = HorizonArea(result.retrospective, Series::kSite);
    result.area_global = HorizonArea(result.retrospective, Series::kGlobal);
  }
  return result;
}

HorizonResult RunCapacityShock(const ScenarioConfig& config) {
  if (config.capacity_overrides.empty()) {
    throw InvalidConfig("capacity shock scenario needs a capacity override");
  }
  return RunHorizon(config);
}

HorizonResult RunOrderChurn(const ScenarioConfig& config) {
  if (!config.churn) {
    throw InvalidConfig("order churn scenario needs a churn configuration");
  }
  return RunHorizon(config);
}

Allocation IdBasedAllocate(const DaySnapshot& day, const Allocation& prev_alloc,
                           const DaySnapshot& prev_day) {
  CheckSnapshot(day);
  std::set<OrderId> prev_ids;
  for (const Order& o : prev_day.orders) prev_ids.insert(o.id);

  const int m = day.n_factories;
  const int catch_all = m - 1;
  std::vector<std::int64_t> room(m, 0);
  for (int j = 0; j < catch_all; ++j) {
    room[j] = *day.capacities.at(FactoryId{j + 1});
  }
  std::vector<int> order_by_id(day.orders.size());
  for (std::size_t p = 0; p < order_by_id.size(); ++p) {
    order_by_id[p] = static_cast<int>(p);
  }
  std::sort(order_by_id.begin(), order_by_id.end(), [&](int a, int b) {
    return day.orders[a].id < day.orders[b].id;
  });

  std::vector<int> assign(day.orders.size(), -1);
  std::vector<int> evicted;
  for (int p : order_by_id) {
    const Order& o = day.orders[p];
    if (!prev_ids.count(o.id)) continue;
    auto it = prev_alloc.assignments.find(o.id);
    if (it == prev_alloc.assignments.end()) continue;
    const int j = it->second.index();
    if (j < 0 || j >= m ||
        !OrderEligibleFactories(o, day.eligibility).ContainsIndex(j)) {
      continue;  // recipes changed: reassign below
    }
    if (j == catch_all) {
      assign[p] = j;
    } else if (room[j] > 0) {
      assign[p] = j;
      room[j]--;
    } else {
      assign[p] = catch_all;
      evicted.push_back(p);
    }
  }

  // Greedy fill of the residual capacities from the unassigned orders.
  auto fill = [&](const std::vector<int>& pool) -> std::optional<std::vector<int>> {
    DaySnapshot sub;
    sub.lead_day = day.lead_day;
    sub.n_recipes = day.n_recipes;
    sub.n_factories = m;
    sub.eligibility = day.eligibility;
    std::vector<std::optional<std::int64_t>> caps(m);
    for (int j = 0; j < catch_all; ++j) caps[j] = room[j];
    sub.capacities = CapacityVector(caps);
    for (int p : pool) sub.orders.push_back(day.orders[p]);
    try {
      const Allocation a = GreedyConstruct(sub);
      std::vector<int> out = assign;
      for (int p : pool) out[p] = a.assignments.at(day.orders[p].id).index();
      return out;
    } catch (const Infeasible&) {
      return std::nullopt;
    }
  };
  std::vector<int> pool;
  for (int p : order_by_id) {
    if (assign[p] < 0) pool.push_back(p);
  }
  auto filled = fill(pool);
  if (!filled && !evicted.empty()) {
    for (int p : evicted) assign[p] = -1;
    pool.insert(pool.end(), evicted.begin(), evicted.end());
    std::sort(pool.begin(), pool.end(), [&](int a, int b) {
      return day.orders[a].id < day.orders[b].id;
    });
    filled = fill(pool);
  }
  if (!filled) return GreedyConstruct(day);
  return AllocationFromPositions(day, *filled);
}

HorizonCurve RetrospectiveCompare(const HorizonResult& result) {
  auto final_it = std::find_if(
      result.days.begin(), result.days.end(),
      [](const DayRecord& r) { return r.lead_day == kFinalLeadDay; });
  if (final_it == result.days.end()) {
    throw MetricError("horizon has no LD3 record to compare against");
  }
  HorizonCurve curve;
  for (const DayRecord& r : result.days) {
    const WmapePair pair = ComputeWmapePair(r.matrix, final_it->matrix);
    curve.push_back({r.lead_day, pair.site, pair.global});
  }
  return curve;
}

std::string SnapshotDigest(const DaySnapshot& day) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  h = Fnv1a(h, day.lead_day);
  h = Fnv1a(h, day.n_recipes);
  h = Fnv1a(h, day.n_factories);
  for (const auto& c : day.capacities.values()) h = Fnv1a(h, c ? *c : -1);
  for (int i = 0; i < day.n_recipes; ++i) {
    for (int j = 0; j < day.n_factories; ++j) {
      h = Fnv1a(h, day.eligibility.EligibleIndex(i, j) ? 1 : 0);
    }
  }
  for (const Order& o : day.orders) {
    h = Fnv1a(h, o.id);
    h = Fnv1a(h, o.is_real ? 1 : 0);
    h = Fnv1a(h, static_cast<std::int64_t>(o.recipes.size()));
    for (RecipeId r : o.recipes) h = Fnv1a(h, r.value);
  }
  return fmt::format("{:016x}", h);
}

}  // namespace bap
