#include "bap/generator.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <queue>
#include <string>
#include <unordered_map>

namespace bap {
namespace {

constexpr double kMixTolerance = 1e-9;

// Group index (0..3) of a recipe, or -1 when it falls in no group.
int GroupOf(const GroupBounds& bounds, int recipe) {
  for (int g = 0; g < 4; ++g) {
    if (bounds[g].Contains(recipe)) return g;
  }
  return -1;
}

int DrawFrom(const std::vector<int>& pool, Rng& rng) {
  return pool[rng.Index(pool.size())];
}

std::vector<int> RangeIds(std::initializer_list<RecipeRange> ranges) {
  std::vector<int> ids;
  for (const RecipeRange& r : ranges) {
    for (int x = r.first; x <= r.last; ++x) ids.push_back(x);
  }
  return ids;
}

EligibilityClass DrawClass(const std::array<double, kNumClasses>& mix,
                           Rng& rng) {
  double u = rng.UniformReal();
  double acc = 0.0;
  for (int c = 0; c < kNumClasses; ++c) {
    acc += mix[c];
    if (u < acc) return static_cast<EligibilityClass>(c);
  }
  for (int c = kNumClasses - 1; c >= 0; --c) {
    if (mix[c] > 0) return static_cast<EligibilityClass>(c);
  }
  return EligibilityClass::kF3Only;
}

std::int64_t RoundCount(double fraction, std::int64_t total) {
  return static_cast<std::int64_t>(
      std::llround(fraction * static_cast<double>(total)));
}

OrderId MaxOrderId(const DaySnapshot& day) {
  OrderId max_id = 0;
  for (const Order& o : day.orders) max_id = std::max(max_id, o.id);
  return max_id;
}

DaySnapshot EmptyDayLike(const GeneratorConfig& config, int lead_day,
                         const CapacityOverrides& overrides) {
  DaySnapshot day;
  day.lead_day = lead_day;
  day.n_recipes = config.n_recipes;
  day.n_factories = config.n_factories();
  day.eligibility = DeriveEligibility(config.group_bounds, config.n_recipes,
                                      day.n_factories);
  day.capacities =
      CapacitiesFor(config, config.total_orders, lead_day, overrides);
  return day;
}

void RequireFeasible(const DaySnapshot& day) {
  if (!CapacityFeasible(day)) {
    throw Infeasible("generated day LD" + std::to_string(-day.lead_day) +
                        " cannot meet its capacities with the configured "
                        "eligibility mix");
  }
}

}  // namespace

const char* ClassName(EligibilityClass c) {
  switch (c) {
    case EligibilityClass::kF1F2F3:
      return "F1F2F3";
    case EligibilityClass::kF1F3:
      return "F1F3";
    case EligibilityClass::kF2F3:
      return "F2F3";
    case EligibilityClass::kF3Only:
      return "F3";
  }
  return "?";
}

FactorySet FactoriesOf(EligibilityClass c) {
  switch (c) {
    case EligibilityClass::kF1F2F3:
      return FactorySet(0b111);
    case EligibilityClass::kF1F3:
      return FactorySet(0b101);
    case EligibilityClass::kF2F3:
      return FactorySet(0b110);
    case EligibilityClass::kF3Only:
      return FactorySet(0b100);
  }
  return FactorySet(0b100);
}

EligibilityClass ClassOf(FactorySet eligible) {
  switch (eligible.bits()) {
    case 0b111:
      return EligibilityClass::kF1F2F3;
    case 0b101:
      return EligibilityClass::kF1F3;
    case 0b110:
      return EligibilityClass::kF2F3;
    case 0b100:
      return EligibilityClass::kF3Only;
    default:
      throw InvalidInstance("eligible set " + eligible.ToString() +
                            " is not a three-factory class");
  }
}

std::map<int, double> DefaultRealFractionSchedule() {
  std::map<int, double> schedule;
  for (int k = 0; k <= 15; ++k) {
    schedule[-18 + k] = (10 + 6 * k) / 100.0;
  }
  return schedule;
}

void GeneratorConfig::Validate() const {
  if (total_orders <= 0) throw InvalidConfig("total_orders must be positive");
  if (n_recipes <= 0) throw InvalidConfig("n_recipes must be positive");
  if (capacity_fractions.size() != 2) {
    throw InvalidConfig(
        "the group eligibility rules are defined for three factories "
        "(two bounded capacity fractions)");
  }
  int expect = 1;
  for (const RecipeRange& g : group_bounds) {
    if (g.first != expect || g.last < g.first) {
      throw InvalidConfig("group bounds must partition 1..n_recipes in order");
    }
    expect = g.last + 1;
  }
  if (expect != n_recipes + 1) {
    throw InvalidConfig("group bounds must end at n_recipes");
  }
  double mix_total = 0.0;
  for (double p : class_mix) {
    if (p < 0.0) throw InvalidConfig("negative class probability");
    mix_total += p;
  }
  if (std::abs(mix_total - 1.0) > kMixTolerance) {
    throw InvalidConfig("class_mix must sum to 1");
  }
  double cap_total = 0.0;
  for (double f : capacity_fractions) {
    if (f < 0.0) throw InvalidConfig("negative capacity fraction");
    cap_total += f;
  }
  if (cap_total >= 1.0) {
    throw InvalidConfig("capacity fractions must sum to less than 1");
  }
  if (min_recipes_per_order < 1 ||
      max_recipes_per_order < min_recipes_per_order) {
    throw InvalidConfig("bad recipes-per-order range");
  }
  if (distinct_recipes &&
      max_recipes_per_order > group_bounds[1].size()) {
    throw InvalidConfig(
        "distinct recipes per order cannot exceed the Group 2 size");
  }
  for (const auto& [day, f] : real_fraction_schedule) {
    if (f < 0.0 || f > 1.0) {
      throw InvalidConfig("real fraction outside [0, 1] for LD" +
                          std::to_string(-day));
    }
  }
}

void ChurnConfig::Validate() const {
  if (delete_fraction < 0.0 || delete_fraction > 1.0 ||
      modify_fraction < 0.0 || modify_fraction > 1.0) {
    throw InvalidConfig("churn fractions must lie in [0, 1]");
  }
}

EligibilityTable DeriveEligibility(const GroupBounds& bounds, int n_recipes,
                                   int n_factories) {
  if (n_factories != 3) {
    throw InvalidConfig("group eligibility rules need exactly 3 factories");
  }
  int expect = 1;
  for (const RecipeRange& g : bounds) {
    if (g.first != expect || g.last < g.first) {
      throw InvalidConfig("group bounds overlap or leave gaps");
    }
    expect = g.last + 1;
  }
  if (expect != n_recipes + 1) {
    throw InvalidConfig("group bounds do not cover 1.." +
                        std::to_string(n_recipes));
  }
  EligibilityTable table(n_recipes, n_factories);
  const FactorySet group_sets[4] = {FactorySet(0b101), FactorySet(0b111),
                                    FactorySet(0b110), FactorySet(0b100)};
  for (int r = 1; r <= n_recipes; ++r) {
    const FactorySet allowed = group_sets[GroupOf(bounds, r)];
    for (int j = 1; j <= n_factories; ++j) {
      table.Set(RecipeId{r}, FactoryId{j}, allowed.Contains(FactoryId{j}));
    }
  }
  return table;
}

CapacityVector CapacitiesFor(const GeneratorConfig& config,
                             std::int64_t total_orders, int lead_day,
                             const CapacityOverrides& overrides) {
  std::vector<std::int64_t> bounded;
  for (double f : config.capacity_fractions) {
    // floor with a small guard so 0.25 * 10 does not become 2.4999...
    bounded.push_back(static_cast<std::int64_t>(
        std::floor(f * static_cast<double>(total_orders) + 1e-9)));
  }
  // Latest override at or before lead_day (days increase toward LD3).
  auto it = overrides.upper_bound(lead_day);
  if (it != overrides.begin()) {
    --it;
    for (const auto& [factory, cap] : it->second) {
      if (factory < 1 || factory > static_cast<int>(bounded.size())) {
        throw InvalidConfig("capacity override names F" +
                            std::to_string(factory) +
                            ", which is not a bounded factory");
      }
      bounded[factory - 1] = cap;
    }
  }
  std::int64_t sum = 0;
  for (std::int64_t c : bounded) {
    if (c < 0) throw InvalidConfig("negative capacity");
    sum += c;
  }
  if (sum > total_orders) {
    throw InvalidConfig("capacities (" + std::to_string(sum) +
                        ") exceed the day's order count (" +
                        std::to_string(total_orders) + ")");
  }
  return CapacityVector::Bounded(bounded);
}

std::array<std::int64_t, kNumClasses> ClassCounts(
    const std::array<double, kNumClasses>& mix, std::int64_t total) {
  std::array<std::int64_t, kNumClasses> counts{};
  std::array<double, kNumClasses> rem{};
  std::int64_t assigned = 0;
  for (int c = 0; c < kNumClasses; ++c) {
    const double exact = mix[c] * static_cast<double>(total);
    counts[c] = static_cast<std::int64_t>(std::floor(exact + 1e-9));
    rem[c] = exact - static_cast<double>(counts[c]);
    assigned += counts[c];
  }
  std::array<int, kNumClasses> order{0, 1, 2, 3};
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return rem[a] > rem[b] + 1e-12; });
  for (int k = 0; assigned < total; k = (k + 1) % kNumClasses) {
    if (mix[order[k]] <= 0.0) continue;
    counts[order[k]]++;
    assigned++;
  }
  return counts;
}

std::vector<RecipeId> DrawRecipes(const GeneratorConfig& config,
                                  EligibilityClass cls, Rng& rng) {
  const GroupBounds& g = config.group_bounds;
  std::vector<int> first_pool;
  std::vector<int> rest_pool;
  switch (cls) {
    case EligibilityClass::kF1F2F3:
      first_pool = RangeIds({g[1]});
      rest_pool = first_pool;
      break;
    case EligibilityClass::kF1F3:
      first_pool = RangeIds({g[0]});
      rest_pool = RangeIds({g[0], g[1]});
      break;
    case EligibilityClass::kF2F3:
      first_pool = RangeIds({g[2]});
      rest_pool = RangeIds({g[1], g[2]});
      break;
    case EligibilityClass::kF3Only:
      first_pool = RangeIds({g[3]});
      rest_pool = RangeIds({g[0], g[1], g[2], g[3]});
      break;
  }
  const int k = static_cast<int>(rng.UniformInt(
      config.min_recipes_per_order, config.max_recipes_per_order));
  std::vector<int> picked;
  picked.push_back(DrawFrom(first_pool, rng));
  while (static_cast<int>(picked.size()) < k) {
    int r = DrawFrom(rest_pool, rng);
    if (config.distinct_recipes &&
        std::find(picked.begin(), picked.end(), r) != picked.end()) {
      continue;
    }
    picked.push_back(r);
  }
  rng.Shuffle(std::span<int>(picked));
  std::vector<RecipeId> out;
  out.reserve(picked.size());
  for (int r : picked) out.push_back(RecipeId{r});
  return out;
}

double RealFractionFor(const GeneratorConfig& config, int lead_day) {
  auto it = config.real_fraction_schedule.find(lead_day);
  if (it == config.real_fraction_schedule.end()) {
    throw InvalidConfig("no real-order fraction scheduled for LD" +
                        std::to_string(-lead_day));
  }
  return it->second;
}

DaySnapshot GenerateDay(const GeneratorConfig& config, int lead_day,
                        const CapacityOverrides& overrides) {
  config.Validate();
  Rng rng(DeriveSeed(config.seed, "generate", lead_day));
  DaySnapshot day = EmptyDayLike(config, lead_day, overrides);

  const auto counts = ClassCounts(config.class_mix, config.total_orders);
  std::vector<EligibilityClass> labels;
  labels.reserve(config.total_orders);
  for (int c = 0; c < kNumClasses; ++c) {
    labels.insert(labels.end(), counts[c], static_cast<EligibilityClass>(c));
  }
  rng.Shuffle(std::span<EligibilityClass>(labels));

  const std::int64_t n_real =
      RoundCount(RealFractionFor(config, lead_day), config.total_orders);
  day.orders.reserve(labels.size());
  for (std::size_t p = 0; p < labels.size(); ++p) {
    Order o;
    o.id = static_cast<OrderId>(p + 1);
    o.recipes = DrawRecipes(config, labels[p], rng);
    o.is_real = static_cast<std::int64_t>(p) < n_real;
    day.orders.push_back(std::move(o));
  }
  RequireFeasible(day);
  return day;
}

DaySnapshot EvolveDay(const DaySnapshot& prev, const GeneratorConfig& config,
                      int next_lead_day, const CapacityOverrides& overrides) {
  config.Validate();
  Rng rng(DeriveSeed(config.seed, "evolve", next_lead_day));
  DaySnapshot day = EmptyDayLike(config, next_lead_day, overrides);

  std::array<std::int64_t, kNumClasses> carried{};
  for (const Order& o : prev.orders) {
    if (!o.is_real) continue;
    day.orders.push_back(o);
    carried[static_cast<int>(
        ClassOf(OrderEligibleFactories(o, day.eligibility)))]++;
  }
  const auto n_carried = static_cast<std::int64_t>(day.orders.size());
  const std::int64_t n_real =
      RoundCount(RealFractionFor(config, next_lead_day), config.total_orders);
  if (n_real < n_carried) {
    throw InvalidConfig("real-order schedule decreases at LD" +
                        std::to_string(-next_lead_day) + " (" +
                        std::to_string(n_real) + " scheduled, " +
                        std::to_string(n_carried) + " carried over)");
  }
  const std::int64_t n_new = config.total_orders - n_carried;
  const std::int64_t n_promoted = n_real - n_carried;

  // New orders restore the configured class sizes as closely as the carried
  // real orders allow.
  const auto target = ClassCounts(config.class_mix, config.total_orders);
  std::array<double, kNumClasses> need{};
  double need_total = 0.0;
  for (int c = 0; c < kNumClasses; ++c) {
    need[c] = static_cast<double>(std::max<std::int64_t>(0, target[c] - carried[c]));
    need_total += need[c];
  }
  std::array<std::int64_t, kNumClasses> new_counts{};
  if (n_new > 0) {
    std::array<double, kNumClasses> weights = config.class_mix;
    if (need_total > 0.0) {
      for (int c = 0; c < kNumClasses; ++c) weights[c] = need[c] / need_total;
    }
    new_counts = ClassCounts(weights, n_new);
  }
  std::vector<EligibilityClass> labels;
  labels.reserve(n_new);
  for (int c = 0; c < kNumClasses; ++c) {
    labels.insert(labels.end(), new_counts[c],
                  static_cast<EligibilityClass>(c));
  }
  rng.Shuffle(std::span<EligibilityClass>(labels));

  OrderId next_id = MaxOrderId(prev) + 1;
  for (std::size_t k = 0; k < labels.size(); ++k) {
    Order o;
    o.id = next_id++;
    o.recipes = DrawRecipes(config, labels[k], rng);
    o.is_real = static_cast<std::int64_t>(k) < n_promoted;
    day.orders.push_back(std::move(o));
  }
  RequireFeasible(day);
  return day;
}

ChurnCounts ChurnCountsFor(std::int64_t real_orders, const ChurnConfig& churn) {
  ChurnCounts counts;
  counts.deleted = RoundCount(churn.delete_fraction, real_orders);
  counts.modified =
      RoundCount(churn.modify_fraction, real_orders - counts.deleted);
  return counts;
}

DaySnapshot ApplyChurn(const DaySnapshot& day, const ChurnConfig& churn,
                       const GeneratorConfig& config, std::uint64_t seed) {
  churn.Validate();
  Rng rng(seed);
  std::vector<std::size_t> real_pos;
  for (std::size_t p = 0; p < day.orders.size(); ++p) {
    if (day.orders[p].is_real) real_pos.push_back(p);
  }
  const ChurnCounts counts =
      ChurnCountsFor(static_cast<std::int64_t>(real_pos.size()), churn);

  rng.Shuffle(std::span<std::size_t>(real_pos));
  std::vector<std::size_t> deleted(real_pos.begin(),
                                   real_pos.begin() + counts.deleted);
  std::vector<std::size_t> survivors(real_pos.begin() + counts.deleted,
                                     real_pos.end());
  std::sort(deleted.begin(), deleted.end());
  std::sort(survivors.begin(), survivors.end());
  rng.Shuffle(std::span<std::size_t>(survivors));
  std::vector<std::size_t> modified(survivors.begin(),
                                    survivors.begin() + counts.modified);
  std::sort(modified.begin(), modified.end());

  DaySnapshot out = day;
  out.orders.clear();
  std::vector<bool> is_deleted(day.orders.size(), false);
  for (std::size_t p : deleted) is_deleted[p] = true;
  std::vector<bool> is_modified(day.orders.size(), false);
  for (std::size_t p : modified) is_modified[p] = true;

  for (std::size_t p = 0; p < day.orders.size(); ++p) {
    if (is_deleted[p]) continue;
    Order o = day.orders[p];
    if (is_modified[p]) {
      o.recipes = DrawRecipes(config, DrawClass(config.class_mix, rng), rng);
    }
    out.orders.push_back(std::move(o));
  }
  OrderId next_id = MaxOrderId(day) + 1;
  for (std::size_t p : deleted) {
    Order o;
    o.id = next_id++;
    o.recipes = DrawRecipes(
        config, ClassOf(OrderEligibleFactories(day.orders[p], day.eligibility)),
        rng);
    o.is_real = false;
    out.orders.push_back(std::move(o));
  }
  return out;
}

bool CapacityFeasible(const std::vector<EligibleSupply>& supply,
                      const std::vector<std::int64_t>& bounded_remaining) {
  // Edmonds-Karp on source -> eligible set -> bounded factory -> sink.
  std::unordered_map<std::uint32_t, std::int64_t> by_set;
  for (const EligibleSupply& s : supply) {
    if (s.count > 0) by_set[s.factories.bits()] += s.count;
  }
  std::vector<std::pair<std::uint32_t, std::int64_t>> sets(by_set.begin(),
                                                           by_set.end());
  std::sort(sets.begin(), sets.end());
  const int nb = static_cast<int>(bounded_remaining.size());
  const int ns = static_cast<int>(sets.size());
  const int source = 0;
  const int sink = 1 + ns + nb;
  const int v = sink + 1;
  constexpr std::int64_t kInf = std::numeric_limits<std::int64_t>::max() / 4;
  std::vector<std::int64_t> cap(static_cast<std::size_t>(v) * v, 0);
  auto at = [&](int a, int b) -> std::int64_t& {
    return cap[static_cast<std::size_t>(a) * v + b];
  };
  std::int64_t demand = 0;
  for (int j = 0; j < nb; ++j) {
    if (bounded_remaining[j] < 0) return false;
    at(1 + ns + j, sink) = bounded_remaining[j];
    demand += bounded_remaining[j];
  }
  for (int k = 0; k < ns; ++k) {
    at(source, 1 + k) = sets[k].second;
    for (int j = 0; j < nb; ++j) {
      if ((sets[k].first >> j) & 1u) at(1 + k, 1 + ns + j) = kInf;
    }
  }
  std::int64_t flow = 0;
  std::vector<int> parent(v);
  while (flow < demand) {
    std::fill(parent.begin(), parent.end(), -1);
    parent[source] = source;
    std::queue<int> q;
    q.push(source);
    while (!q.empty() && parent[sink] < 0) {
      int a = q.front();
      q.pop();
      for (int b = 0; b < v; ++b) {
        if (parent[b] < 0 && at(a, b) > 0) {
          parent[b] = a;
          q.push(b);
        }
      }
    }
    if (parent[sink] < 0) break;
    std::int64_t push = kInf;
    for (int b = sink; b != source; b = parent[b]) {
      push = std::min(push, at(parent[b], b));
    }
    for (int b = sink; b != source; b = parent[b]) {
      at(parent[b], b) -= push;
      at(b, parent[b]) += push;
    }
    flow += push;
  }
  return flow == demand;
}

bool CapacityFeasible(const DaySnapshot& day) {
  std::vector<EligibleSupply> supply;
  supply.reserve(day.orders.size());
  for (const Order& o : day.orders) {
    supply.push_back({OrderEligibleFactories(o, day.eligibility), 1});
  }
  std::vector<std::int64_t> remaining;
  for (int j = 1; j <= day.n_factories; ++j) {
    auto c = day.capacities.at(FactoryId{j});
    if (c.has_value()) remaining.push_back(*c);
  }
  return CapacityFeasible(supply, remaining);
}

}  // namespace bap
