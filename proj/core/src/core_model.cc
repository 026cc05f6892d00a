#include "bap/core_model.h"

#include <algorithm>
#include <bit>
#include <sstream>
#include <unordered_map>
#include <unordered_set>
#include <utility>

namespace bap {

FactorySet FactorySet::All(int n_factories) {
  if (n_factories <= 0 || n_factories > kMaxFactories) {
    throw InvalidInstance("factory count out of range: " +
                          std::to_string(n_factories));
  }
  if (n_factories == kMaxFactories) return FactorySet(~0u);
  return FactorySet((1u << n_factories) - 1u);
}

int FactorySet::Size() const { return std::popcount(bits_); }

std::vector<FactoryId> FactorySet::Members() const {
  std::vector<FactoryId> out;
  for (int j = 0; j < kMaxFactories; ++j) {
    if (ContainsIndex(j)) out.push_back(FactoryId{j + 1});
  }
  return out;
}

std::string FactorySet::ToString() const {
  std::string s;
  for (FactoryId f : Members()) {
    if (!s.empty()) s += ',';
    s += 'F' + std::to_string(f.value);
  }
  return s;
}

EligibilityTable::EligibilityTable(int n_recipes, int n_factories)
    : n_recipes_(n_recipes),
      n_factories_(n_factories),
      cells_(static_cast<std::size_t>(n_recipes) * n_factories, 1) {
  if (n_recipes < 0 || n_factories <= 0 || n_factories > kMaxFactories) {
    throw InvalidInstance("bad eligibility table shape");
  }
}

void EligibilityTable::Set(RecipeId r, FactoryId f, bool eligible) {
  if (r.value < 1 || r.value > n_recipes_ || f.value < 1 ||
      f.value > n_factories_) {
    throw InvalidInstance("eligibility cell out of range");
  }
  cells_[static_cast<std::size_t>(r.index()) * n_factories_ + f.index()] =
      eligible ? 1 : 0;
}

CapacityVector::CapacityVector(std::vector<std::optional<std::int64_t>> values)
    : values_(std::move(values)) {
  if (values_.empty()) throw InvalidInstance("empty capacity vector");
  if (values_.back().has_value()) {
    throw InvalidInstance("last factory must be the unbounded catch-all");
  }
  for (std::size_t j = 0; j + 1 < values_.size(); ++j) {
    if (!values_[j].has_value()) {
      throw InvalidInstance("only the last factory may be unbounded (F" +
                            std::to_string(j + 1) + " is null)");
    }
    if (*values_[j] < 0) {
      throw InvalidInstance("negative capacity for F" + std::to_string(j + 1));
    }
  }
}

CapacityVector CapacityVector::Bounded(
    const std::vector<std::int64_t>& bounded) {
  std::vector<std::optional<std::int64_t>> v(bounded.begin(), bounded.end());
  v.push_back(std::nullopt);
  return CapacityVector(std::move(v));
}

std::int64_t CapacityVector::BoundedTotal() const {
  std::int64_t total = 0;
  for (const auto& c : values_) total += c.value_or(0);
  return total;
}

void CheckSnapshot(const DaySnapshot& day) {
  if (day.n_recipes <= 0) throw InvalidInstance("n_recipes must be positive");
  if (day.n_factories <= 0 || day.n_factories > kMaxFactories) {
    throw InvalidInstance("n_factories out of range");
  }
  if (day.capacities.size() != day.n_factories) {
    throw InvalidInstance("capacity vector has " +
                          std::to_string(day.capacities.size()) +
                          " entries, expected " +
                          std::to_string(day.n_factories));
  }
  if (day.eligibility.n_recipes() != day.n_recipes ||
      day.eligibility.n_factories() != day.n_factories) {
    throw InvalidInstance("eligibility table shape does not match instance");
  }
  for (int i = 0; i < day.n_recipes; ++i) {
    if (!day.eligibility.EligibleIndex(i, day.n_factories - 1)) {
      throw InvalidInstance("catch-all factory must accept recipe " +
                            std::to_string(i + 1));
    }
  }
  std::unordered_set<OrderId> seen;
  seen.reserve(day.orders.size());
  for (const Order& o : day.orders) {
    if (!seen.insert(o.id).second) {
      throw InvalidInstance("duplicate order id " + std::to_string(o.id));
    }
    if (o.recipes.empty()) {
      throw InvalidInstance("order " + std::to_string(o.id) +
                            " has no recipes");
    }
    for (RecipeId r : o.recipes) {
      if (r.value < 1 || r.value > day.n_recipes) {
        throw InvalidInstance("order " + std::to_string(o.id) +
                              " references recipe " +
                              std::to_string(r.value) + " outside 1.." +
                              std::to_string(day.n_recipes));
      }
    }
  }
  if (day.capacities.BoundedTotal() >
      static_cast<std::int64_t>(day.orders.size())) {
    throw InvalidInstance("bounded capacities exceed the day's order count");
  }
}

std::int64_t TotalRecipeUnits(const DaySnapshot& day) {
  std::int64_t total = 0;
  for (const Order& o : day.orders) {
    total += static_cast<std::int64_t>(o.recipes.size());
  }
  return total;
}

RecipeSiteMatrix::RecipeSiteMatrix(int n_recipes, int n_factories)
    : n_recipes_(n_recipes),
      n_factories_(n_factories),
      cells_(static_cast<std::size_t>(n_recipes) * n_factories, 0) {}

std::int64_t RecipeSiteMatrix::Total() const {
  std::int64_t total = 0;
  for (std::int64_t v : cells_) total += v;
  return total;
}

std::string ValidationReport::Summary() const {
  std::ostringstream os;
  for (const auto& v : capacity_violations) {
    os << "capacity F" << v.factory.value << ": assigned " << v.assigned
       << ", required " << v.required << "\n";
  }
  for (const auto& v : eligibility_violations) {
    os << "eligibility: order " << v.order << " at F" << v.factory.value
       << "\n";
  }
  for (OrderId id : unassigned_or_duplicate) {
    os << "assignment: order " << id << " missing or unknown\n";
  }
  return os.str();
}

ValidationError::ValidationError(ValidationReport report)
    : Error("allocation violates constraints:\n" + report.Summary()),
      report_(std::move(report)) {}

FactorySet OrderEligibleFactories(const Order& order,
                                  const EligibilityTable& table) {
  FactorySet set = FactorySet::All(table.n_factories());
  std::uint32_t bits = set.bits();
  for (RecipeId r : order.recipes) {
    if (r.value < 1 || r.value > table.n_recipes()) {
      throw InvalidInstance("recipe " + std::to_string(r.value) +
                            " outside eligibility table");
    }
    for (int j = 0; j < table.n_factories(); ++j) {
      if (!table.EligibleIndex(r.index(), j)) bits &= ~(1u << j);
    }
  }
  // The catch-all accepts everything even if a table says otherwise.
  bits |= 1u << (table.n_factories() - 1);
  return FactorySet(bits);
}

ValidationReport ValidateAllocation(const DaySnapshot& day,
                                    const Allocation& alloc) {
  ValidationReport report;
  std::vector<std::int64_t> assigned(day.n_factories, 0);
  std::unordered_set<OrderId> day_ids;
  day_ids.reserve(day.orders.size());
  for (const Order& o : day.orders) {
    day_ids.insert(o.id);
    auto it = alloc.assignments.find(o.id);
    if (it == alloc.assignments.end()) {
      report.unassigned_or_duplicate.push_back(o.id);
      continue;
    }
    FactoryId f = it->second;
    if (f.value < 1 || f.value > day.n_factories) {
      report.eligibility_violations.push_back({o.id, f});
      continue;
    }
    assigned[f.index()]++;
    if (!OrderEligibleFactories(o, day.eligibility).Contains(f)) {
      report.eligibility_violations.push_back({o.id, f});
    }
  }
  for (const auto& [id, f] : alloc.assignments) {
    if (!day_ids.contains(id)) report.unassigned_or_duplicate.push_back(id);
  }
  for (int j = 0; j < day.n_factories; ++j) {
    auto cap = day.capacities.at(FactoryId{j + 1});
    if (cap.has_value() && *cap != assigned[j]) {
      report.capacity_violations.push_back(
          {FactoryId{j + 1}, assigned[j], *cap});
    }
  }
  std::sort(report.unassigned_or_duplicate.begin(),
            report.unassigned_or_duplicate.end());
  return report;
}

RecipeSiteMatrix BuildRecipeSiteMatrix(const DaySnapshot& day,
                                       const Allocation& alloc) {
  ValidationReport report = ValidateAllocation(day, alloc);
  if (!report.ok()) throw ValidationError(std::move(report));
  RecipeSiteMatrix m(day.n_recipes, day.n_factories);
  for (const Order& o : day.orders) {
    const int j = alloc.assignments.at(o.id).index();
    for (RecipeId r : o.recipes) m.cell(r.index(), j)++;
  }
  return m;
}

RecipeSiteMatrix BuildRecipeSiteMatrix(const DaySnapshot& day,
                                       std::span<const int> factory_index) {
  RecipeSiteMatrix m(day.n_recipes, day.n_factories);
  for (std::size_t p = 0; p < day.orders.size(); ++p) {
    for (RecipeId r : day.orders[p].recipes) {
      m.cell(r.index(), factory_index[p])++;
    }
  }
  return m;
}

std::vector<std::int64_t> AggregateRecipeVector(const RecipeSiteMatrix& m) {
  std::vector<std::int64_t> out(m.n_recipes(), 0);
  for (int i = 0; i < m.n_recipes(); ++i) {
    for (int j = 0; j < m.n_factories(); ++j) out[i] += m.cell(i, j);
  }
  return out;
}

Allocation AllocationFromPositions(const DaySnapshot& day,
                                   std::span<const int> factory_index) {
  Allocation alloc;
  alloc.lead_day = day.lead_day;
  for (std::size_t p = 0; p < day.orders.size(); ++p) {
    alloc.assignments.emplace_hint(alloc.assignments.end(), day.orders[p].id,
                                   FactoryId{factory_index[p] + 1});
  }
  return alloc;
}

std::vector<int> PositionsFromAllocation(const DaySnapshot& day,
                                         const Allocation& alloc) {
  std::vector<int> out(day.orders.size());
  ValidationReport missing;
  for (std::size_t p = 0; p < day.orders.size(); ++p) {
    auto it = alloc.assignments.find(day.orders[p].id);
    if (it == alloc.assignments.end()) {
      missing.unassigned_or_duplicate.push_back(day.orders[p].id);
      continue;
    }
    out[p] = it->second.index();
  }
  if (!missing.ok()) throw ValidationError(std::move(missing));
  return out;
}

}  // namespace bap
