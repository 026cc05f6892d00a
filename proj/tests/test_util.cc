#include "test_util.h"

#include <cstdlib>
#include <filesystem>

#include <unistd.h>

namespace bap::testing {

DaySnapshot MakeDay(int lead_day, int n_recipes,
                    const std::vector<std::int64_t>& bounded_caps,
                    const EligibilityTable& eligibility,
                    const std::vector<OrderSpec>& orders) {
  DaySnapshot day;
  day.lead_day = lead_day;
  day.n_recipes = n_recipes;
  day.n_factories = static_cast<int>(bounded_caps.size()) + 1;
  day.capacities = CapacityVector::Bounded(bounded_caps);
  day.eligibility = eligibility;
  for (const OrderSpec& spec : orders) {
    Order o;
    o.id = spec.id;
    o.is_real = spec.is_real;
    for (int r : spec.recipes) o.recipes.push_back(RecipeId{r});
    day.orders.push_back(std::move(o));
  }
  return day;
}

Allocation MakeAllocation(const DaySnapshot& day,
                          const std::vector<int>& factory_of) {
  Allocation a;
  a.lead_day = day.lead_day;
  for (std::size_t k = 0; k < day.orders.size(); ++k) {
    a.assignments[day.orders[k].id] = FactoryId{factory_of[k]};
  }
  return a;
}

DaySnapshot ToyDay15() {
  return MakeDay(-15, 10, {2, 2}, EligibilityTable(10, 3),
                 {{1, {1, 10}},
                  {2, {2, 3, 5}},
                  {3, {4, 6}},
                  {4, {2, 3, 7}},
                  {5, {3, 5, 9}}});
}

DaySnapshot ToyDay14() {
  return MakeDay(-14, 10, {2, 2}, EligibilityTable(10, 3),
                 {{1, {2, 5}},
                  {2, {2, 6, 7}},
                  {3, {3, 5, 9}},
                  {4, {4, 6, 8}},
                  {5, {5, 9, 10}}});
}

Allocation ToyAllocation15() {
  return MakeAllocation(ToyDay15(), {1, 1, 2, 2, 3});
}

Allocation ToyAllocation14() {
  return MakeAllocation(ToyDay14(), {1, 3, 1, 2, 2});
}

EligibilityTable HandGroupEligibility() {
  EligibilityTable t(100, 3);
  for (int r = 1; r <= 100; ++r) {
    const bool f1 = r <= 49;
    const bool f2 = r >= 30 && r <= 89;
    t.Set(RecipeId{r}, FactoryId{1}, f1);
    t.Set(RecipeId{r}, FactoryId{2}, f2);
  }
  return t;
}

DaySnapshot TenOrderDay12() {
  return MakeDay(-12, 100, {2, 5}, HandGroupEligibility(),
                 {{1, {30}, true},
                  {2, {8, 5, 24}, true},
                  {3, {22}, true},
                  {4, {87}, true},
                  {5, {52, 51, 55, 63}},
                  {6, {82, 88}},
                  {7, {85}},
                  {8, {84, 76}},
                  {9, {93, 1, 36, 76}},
                  {10, {28, 95, 20}}});
}

DaySnapshot TenOrderDay11() {
  return MakeDay(-11, 100, {2, 5}, HandGroupEligibility(),
                 {{1, {30}, true},
                  {2, {8, 5, 24}, true},
                  {3, {22}, true},
                  {4, {87}, true},
                  {5, {74}, true},
                  {6, {85}},
                  {7, {89, 73, 86}},
                  {8, {54, 52}},
                  {9, {100, 99}},
                  {10, {91, 13}}});
}

Allocation TenOrderSolution12() {
  return MakeAllocation(TenOrderDay12(), {2, 1, 1, 2, 2, 2, 3, 2, 3, 3});
}

std::vector<std::vector<std::int64_t>> NaiveMatrix(const DaySnapshot& day,
                                                   const Allocation& alloc) {
  std::vector<std::vector<std::int64_t>> m(
      day.n_recipes, std::vector<std::int64_t>(day.n_factories, 0));
  for (const Order& o : day.orders) {
    const int j = alloc.assignments.at(o.id).value - 1;
    for (RecipeId r : o.recipes) m[r.value - 1][j] += 1;
  }
  return m;
}

std::pair<std::int64_t, std::int64_t> NaiveSiteGlobal(
    const RecipeSiteMatrix& prev, const RecipeSiteMatrix& cur) {
  std::int64_t site = 0;
  std::int64_t global = 0;
  for (int i = 0; i < cur.n_recipes(); ++i) {
    std::int64_t row = 0;
    for (int j = 0; j < cur.n_factories(); ++j) {
      const std::int64_t d = cur.cell(i, j) - prev.cell(i, j);
      site += d < 0 ? -d : d;
      row += d;
    }
    global += row < 0 ? -row : row;
  }
  return {site, global};
}

namespace {

std::vector<OrderSpec> RandomOrders(std::mt19937_64& rng, int n_orders,
                                    int n_recipes, int max_per_order,
                                    OrderId first_id) {
  std::uniform_int_distribution<int> count(1, max_per_order);
  std::uniform_int_distribution<int> recipe(1, n_recipes);
  std::vector<OrderSpec> out;
  for (int k = 0; k < n_orders; ++k) {
    OrderSpec spec{first_id + k, {}, rng() % 2 == 0};
    const int c = count(rng);
    for (int t = 0; t < c; ++t) spec.recipes.push_back(recipe(rng));
    out.push_back(std::move(spec));
  }
  return out;
}

std::vector<int> RandomEligibleAssignment(const DaySnapshot& day,
                                          std::mt19937_64& rng) {
  std::vector<int> f;
  for (const Order& o : day.orders) {
    std::vector<int> options;
    for (int j = 1; j <= day.n_factories; ++j) {
      bool ok = true;
      for (RecipeId r : o.recipes) {
        ok = ok && day.eligibility.Eligible(r, FactoryId{j});
      }
      if (ok) options.push_back(j);
    }
    f.push_back(options[rng() % options.size()]);
  }
  return f;
}

}  // namespace

SmallCase RandomSmallCase(std::mt19937_64& rng, int max_orders,
                          int max_recipes, int max_recipes_per_order) {
  std::uniform_int_distribution<int> n_orders_dist(1, max_orders);
  std::uniform_int_distribution<int> n_recipes_dist(1, max_recipes);
  const int n_orders = n_orders_dist(rng);
  const int n_recipes = n_recipes_dist(rng);
  EligibilityTable table(n_recipes, 3);
  std::bernoulli_distribution coin(0.65);
  for (int r = 1; r <= n_recipes; ++r) {
    table.Set(RecipeId{r}, FactoryId{1}, coin(rng));
    table.Set(RecipeId{r}, FactoryId{2}, coin(rng));
  }
  SmallCase c;
  c.day = MakeDay(-11, n_recipes, {0, 0}, table,
                  RandomOrders(rng, n_orders, n_recipes,
                               max_recipes_per_order, 1));
  const std::vector<int> assign = RandomEligibleAssignment(c.day, rng);
  std::int64_t f1 = 0;
  std::int64_t f2 = 0;
  for (int j : assign) {
    f1 += j == 1;
    f2 += j == 2;
  }
  c.day.capacities = CapacityVector::Bounded({f1, f2});
  c.base = MakeAllocation(c.day, assign);

  DaySnapshot prev_day =
      MakeDay(-12, n_recipes, {0, 0}, table,
              RandomOrders(rng, n_orders_dist(rng), n_recipes,
                           max_recipes_per_order, 100));
  const std::vector<int> prev_assign = RandomEligibleAssignment(prev_day, rng);
  const auto naive = NaiveMatrix(prev_day, MakeAllocation(prev_day, prev_assign));
  c.prev = RecipeSiteMatrix(n_recipes, 3);
  for (int i = 0; i < n_recipes; ++i) {
    for (int j = 0; j < 3; ++j) c.prev.cell(i, j) = naive[i][j];
  }
  return c;
}

Allocation ShuffleFeasible(const DaySnapshot& day, const Allocation& base,
                           std::mt19937_64& rng, int swaps) {
  Allocation a = base;
  const int n = static_cast<int>(day.orders.size());
  auto eligible = [&](const Order& o, FactoryId f) {
    for (RecipeId r : o.recipes) {
      if (!day.eligibility.Eligible(r, f)) return false;
    }
    return true;
  };
  for (int t = 0; t < swaps && n > 1; ++t) {
    const Order& x = day.orders[rng() % n];
    const Order& y = day.orders[rng() % n];
    FactoryId fx = a.assignments[x.id];
    FactoryId fy = a.assignments[y.id];
    if (fx == fy || !eligible(x, fy) || !eligible(y, fx)) continue;
    a.assignments[x.id] = fy;
    a.assignments[y.id] = fx;
  }
  return a;
}

std::string TempDir(const std::string& tag) {
  namespace fs = std::filesystem;
  static int counter = 0;
  const fs::path p = fs::temp_directory_path() /
                     ("bap_test_" + tag + "_" + std::to_string(::getpid()) +
                      "_" + std::to_string(counter++));
  fs::remove_all(p);
  fs::create_directories(p);
  return p.string();
}

}  // namespace bap::testing
