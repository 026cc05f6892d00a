#ifndef BAP_CORE_MODEL_H_
#define BAP_CORE_MODEL_H_

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bap/errors.h"

namespace bap {

// 1-based recipe identifier. index() is the dense 0-based position.
struct RecipeId {
  int value = 0;
  constexpr int index() const { return value - 1; }
  constexpr auto operator<=>(const RecipeId&) const = default;
};

// 1-based factory identifier. The highest id of an instance is the catch-all.
struct FactoryId {
  int value = 0;
  constexpr int index() const { return value - 1; }
  constexpr auto operator<=>(const FactoryId&) const = default;
};

using OrderId = std::int64_t;

inline constexpr int kMaxFactories = 32;

// Small bitset of factories (at most kMaxFactories).
class FactorySet {
 public:
  constexpr FactorySet() = default;
  constexpr explicit FactorySet(std::uint32_t bits) : bits_(bits) {}

  static FactorySet All(int n_factories);

  constexpr bool Contains(FactoryId f) const {
    return (bits_ >> f.index()) & 1u;
  }
  constexpr bool ContainsIndex(int j) const { return (bits_ >> j) & 1u; }
  void Insert(FactoryId f) { bits_ |= 1u << f.index(); }
  int Size() const;
  bool Empty() const { return bits_ == 0; }
  std::vector<FactoryId> Members() const;
  constexpr std::uint32_t bits() const { return bits_; }
  std::string ToString() const;  // "F1,F3"

  constexpr bool operator==(const FactorySet&) const = default;

 private:
  std::uint32_t bits_ = 0;
};

struct Order {
  OrderId id = 0;
  std::vector<RecipeId> recipes;  // multiset; duplicates allowed
  bool is_real = false;

  bool operator==(const Order&) const = default;
};

// E(i, j): whether recipe i can be produced at factory j.
class EligibilityTable {
 public:
  EligibilityTable() = default;
  // All-true table.
  EligibilityTable(int n_recipes, int n_factories);

  bool Eligible(RecipeId r, FactoryId f) const {
    return cells_[static_cast<std::size_t>(r.index()) * n_factories_ +
                  f.index()] != 0;
  }
  bool EligibleIndex(int i, int j) const {
    return cells_[static_cast<std::size_t>(i) * n_factories_ + j] != 0;
  }
  void Set(RecipeId r, FactoryId f, bool eligible);

  int n_recipes() const { return n_recipes_; }
  int n_factories() const { return n_factories_; }

  bool operator==(const EligibilityTable&) const = default;

 private:
  int n_recipes_ = 0;
  int n_factories_ = 0;
  std::vector<std::uint8_t> cells_;
};

// Per-factory capacity. The last factory is the catch-all and carries no
// capacity (std::nullopt); every other factory must be bounded.
class CapacityVector {
 public:
  CapacityVector() = default;
  explicit CapacityVector(std::vector<std::optional<std::int64_t>> values);

  // Convenience: bounded capacities for factories 1..m-1, catch-all appended.
  static CapacityVector Bounded(const std::vector<std::int64_t>& bounded);

  int size() const { return static_cast<int>(values_.size()); }
  bool IsBounded(FactoryId f) const { return values_[f.index()].has_value(); }
  std::optional<std::int64_t> at(FactoryId f) const {
    return values_[f.index()];
  }
  std::int64_t BoundedTotal() const;
  const std::vector<std::optional<std::int64_t>>& values() const {
    return values_;
  }

  bool operator==(const CapacityVector&) const = default;

 private:
  std::vector<std::optional<std::int64_t>> values_;
};

struct DaySnapshot {
  int lead_day = 0;
  int n_recipes = 0;
  int n_factories = 0;
  std::vector<Order> orders;
  CapacityVector capacities;
  EligibilityTable eligibility;

  FactoryId catch_all() const { return FactoryId{n_factories}; }
  bool operator==(const DaySnapshot&) const = default;
};

// Throws InvalidInstance on shape errors, out-of-range recipes, duplicate
// order ids, an empty recipe list, or a malformed capacity vector.
void CheckSnapshot(const DaySnapshot& day);

std::int64_t TotalRecipeUnits(const DaySnapshot& day);

// Total order -> factory assignment for one day.
struct Allocation {
  int lead_day = 0;
  std::map<OrderId, FactoryId> assignments;

  bool operator==(const Allocation&) const = default;
};

// a(i, j): units of recipe i assigned to factory j.
class RecipeSiteMatrix {
 public:
  RecipeSiteMatrix() = default;
  RecipeSiteMatrix(int n_recipes, int n_factories);

  std::int64_t at(RecipeId r, FactoryId f) const {
    return cells_[Offset(r.index(), f.index())];
  }
  std::int64_t cell(int i, int j) const { return cells_[Offset(i, j)]; }
  std::int64_t& cell(int i, int j) { return cells_[Offset(i, j)]; }

  int n_recipes() const { return n_recipes_; }
  int n_factories() const { return n_factories_; }
  std::int64_t Total() const;
  std::span<const std::int64_t> data() const { return cells_; }

  bool operator==(const RecipeSiteMatrix&) const = default;

 private:
  std::size_t Offset(int i, int j) const {
    return static_cast<std::size_t>(i) * n_factories_ + j;
  }

  int n_recipes_ = 0;
  int n_factories_ = 0;
  std::vector<std::int64_t> cells_;
};

struct CapacityViolation {
  FactoryId factory;
  std::int64_t assigned = 0;
  std::int64_t required = 0;
  bool operator==(const CapacityViolation&) const = default;
};

struct EligibilityViolation {
  OrderId order = 0;
  FactoryId factory;
  bool operator==(const EligibilityViolation&) const = default;
};

struct ValidationReport {
  std::vector<CapacityViolation> capacity_violations;
  std::vector<EligibilityViolation> eligibility_violations;
  // Orders of the day with no assignment, plus assignments naming orders
  // that are not part of the day.
  std::vector<OrderId> unassigned_or_duplicate;

  bool ok() const {
    return capacity_violations.empty() && eligibility_violations.empty() &&
           unassigned_or_duplicate.empty();
  }
  std::string Summary() const;
};

class ValidationError : public Error {
 public:
  explicit ValidationError(ValidationReport report);
  const ValidationReport& report() const { return report_; }

 private:
  ValidationReport report_;
};

// Factories at which every recipe of the order is eligible. Always contains
// the catch-all factory.
FactorySet OrderEligibleFactories(const Order& order,
                                  const EligibilityTable& table);

ValidationReport ValidateAllocation(const DaySnapshot& day,
                                    const Allocation& alloc);

// Throws ValidationError when the allocation is not feasible for the day.
RecipeSiteMatrix BuildRecipeSiteMatrix(const DaySnapshot& day,
                                       const Allocation& alloc);

// Unchecked variant over order positions: factory_index[p] is the 0-based
// factory of day.orders[p].
RecipeSiteMatrix BuildRecipeSiteMatrix(const DaySnapshot& day,
                                       std::span<const int> factory_index);

// Row sums: a(i) = sum_j a(i, j).
std::vector<std::int64_t> AggregateRecipeVector(const RecipeSiteMatrix& m);

// Positional <-> id-keyed conversions.
Allocation AllocationFromPositions(const DaySnapshot& day,
                                   std::span<const int> factory_index);
// Throws ValidationError if some order of the day is missing.
std::vector<int> PositionsFromAllocation(const DaySnapshot& day,
                                         const Allocation& alloc);

}  // namespace bap

#endif  // BAP_CORE_MODEL_H_
