#ifndef BAP_GENERATOR_H_
#define BAP_GENERATOR_H_

#include <array>
#include <cstdint>
#include <map>
#include <vector>

#include "bap/core_model.h"
#include "bap/random.h"

namespace bap {

// Eligibility classes produced by the three-factory generator, named by the
// factories an order of the class may go to.
enum class EligibilityClass : int {
  kF1F2F3 = 0,
  kF1F3 = 1,
  kF2F3 = 2,
  kF3Only = 3,
};
inline constexpr int kNumClasses = 4;

const char* ClassName(EligibilityClass c);
FactorySet FactoriesOf(EligibilityClass c);
// Inverse of FactoriesOf for the four sets a three-factory order can have.
EligibilityClass ClassOf(FactorySet eligible);

struct RecipeRange {
  int first = 0;
  int last = 0;
  bool Contains(int r) const { return r >= first && r <= last; }
  int size() const { return last - first + 1; }
  bool operator==(const RecipeRange&) const = default;
};

// Group 1 -> {F1,F3}, Group 2 -> {F1,F2,F3}, Group 3 -> {F2,F3},
// Group 4 -> {F3}.
using GroupBounds = std::array<RecipeRange, 4>;

inline constexpr GroupBounds kDefaultGroupBounds = {
    {{1, 29}, {30, 49}, {50, 89}, {90, 100}}};

// lead_day -> fraction of real orders. Default: 10% at LD18 rising six
// points per day to 100% at LD3.
std::map<int, double> DefaultRealFractionSchedule();

struct GeneratorConfig {
  std::int64_t total_orders = 10000;
  int n_recipes = 100;
  GroupBounds group_bounds = kDefaultGroupBounds;
  // Indexed by EligibilityClass.
  std::array<double, kNumClasses> class_mix = {0.10, 0.20, 0.50, 0.20};
  // One entry per bounded factory (F1, F2); F3 is the catch-all.
  std::vector<double> capacity_fractions = {0.25, 0.50};
  int min_recipes_per_order = 1;
  int max_recipes_per_order = 4;
  bool distinct_recipes = true;
  std::map<int, double> real_fraction_schedule = DefaultRealFractionSchedule();
  std::uint64_t seed = 1;

  int n_factories() const {
    return static_cast<int>(capacity_fractions.size()) + 1;
  }
  // Throws InvalidConfig.
  void Validate() const;
};

struct ChurnConfig {
  double delete_fraction = 0.05;
  double modify_fraction = 0.30;
  void Validate() const;
};

// lead_day -> (factory id -> capacity). An override applies from its lead
// day onward until a later override replaces it.
using CapacityOverrides = std::map<int, std::map<int, std::int64_t>>;

EligibilityTable DeriveEligibility(const GroupBounds& bounds, int n_recipes,
                                   int n_factories);

// floor(fraction * total) per bounded factory, then any override in force
// for lead_day.
CapacityVector CapacitiesFor(const GeneratorConfig& config,
                             std::int64_t total_orders, int lead_day,
                             const CapacityOverrides& overrides = {});

// Class sizes by largest remainder over class_mix (ties to the lower class).
std::array<std::int64_t, kNumClasses> ClassCounts(
    const std::array<double, kNumClasses>& mix, std::int64_t total);

// Draws a recipe list consistent with the class.
std::vector<RecipeId> DrawRecipes(const GeneratorConfig& config,
                                  EligibilityClass cls, Rng& rng);

double RealFractionFor(const GeneratorConfig& config, int lead_day);

// Fresh order book with ids 1..N. The first round(fraction * N) ids are real.
DaySnapshot GenerateDay(const GeneratorConfig& config, int lead_day,
                        const CapacityOverrides& overrides = {});

// Carries every real order over unchanged, adds newly arrived real orders and
// regenerates simulated orders with fresh ids so the day total is preserved.
DaySnapshot EvolveDay(const DaySnapshot& prev, const GeneratorConfig& config,
                      int next_lead_day,
                      const CapacityOverrides& overrides = {});

// Deletes a share of real orders (replaced by fresh simulated orders of the
// same class) and redraws recipes of a share of the survivors.
DaySnapshot ApplyChurn(const DaySnapshot& day, const ChurnConfig& churn,
                       const GeneratorConfig& config, std::uint64_t seed);

struct ChurnCounts {
  std::int64_t deleted = 0;
  std::int64_t modified = 0;
};
ChurnCounts ChurnCountsFor(std::int64_t real_orders, const ChurnConfig& churn);

// Maximum-flow check that the bounded capacities can be met exactly.
bool CapacityFeasible(const DaySnapshot& day);

// Supply of orders per distinct eligible set vs bounded capacities.
struct EligibleSupply {
  FactorySet factories;
  std::int64_t count = 0;
};
bool CapacityFeasible(const std::vector<EligibleSupply>& supply,
                      const std::vector<std::int64_t>& bounded_remaining);

}  // namespace bap

#endif  // BAP_GENERATOR_H_
