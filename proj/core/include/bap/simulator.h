#ifndef BAP_SIMULATOR_H_
#define BAP_SIMULATOR_H_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "bap/core_model.h"
#include "bap/generator.h"
#include "bap/heuristics.h"
#include "bap/metrics.h"
#include "bap/solve_result.h"

namespace bap {

enum class SolverKind { kExact, kGreedy, kItps, kTabu, kIdBased };

const char* SolverName(SolverKind kind);  // "exact", "greedy", ...
SolverKind SolverFromName(const std::string& name);  // throws InvalidConfig

std::vector<int> DefaultHorizonDays();  // -18 .. -3

struct ScenarioConfig {
  std::vector<int> days = DefaultHorizonDays();
  SolverKind solver = SolverKind::kExact;
  CapacityOverrides capacity_overrides;
  std::optional<ChurnConfig> churn;
  GeneratorConfig generator;
  // Per-day budget of the exact solver.
  double budget_seconds = 600.0;
  ItpsParams itps;
  TabuParams tabu;

  // Contiguous ascending days, overrides on configured days and bounded
  // factories. Throws InvalidConfig.
  void Validate() const;
};

struct DayRecord {
  int lead_day = 0;
  std::string digest;  // of the realised snapshot
  DaySnapshot snapshot;
  Allocation allocation;
  RecipeSiteMatrix matrix;
  WmapePair vs_previous;  // first day: against itself
  SolveStatus status = SolveStatus::kFeasibleBudgetHit;
  double elapsed_seconds = 0.0;
  std::int64_t nodes_explored = 0;
  std::optional<std::int64_t> lower_bound_numerator;
  double real_fraction = 0.0;
};

struct HorizonResult {
  ScenarioConfig config;
  std::vector<DayRecord> days;
  // Each day's matrix against the final (LD3) matrix; empty for a single
  // day or when the horizon does not reach LD3.
  HorizonCurve retrospective;
  Ratio area_site{0};    // under the retrospective curves
  Ratio area_global{0};
};

// Day t is solved against day t-1's realised matrix. The first day is
// allocated greedily and scored against itself. With churn configured, it
// is applied to every day after the first before solving.
// Errors from a day are rethrown with the lead day in the message.
HorizonResult RunHorizon(const ScenarioConfig& config);
// RunHorizon that insists on at least one capacity override.
HorizonResult RunCapacityShock(const ScenarioConfig& config);
// RunHorizon that insists on a churn configuration.
HorizonResult RunOrderChurn(const ScenarioConfig& config);

// Carried-over orders keep yesterday's factory while eligible and while the
// factory has room (ascending id); displaced orders go to the catch-all.
// Residual bounded capacity is filled greedily from new and no-longer
// eligible orders. Falls back to plain greedy if that cannot fill a factory.
Allocation IdBasedAllocate(const DaySnapshot& day, const Allocation& prev_alloc,
                           const DaySnapshot& prev_day);

// Per-day WmapePair of each day's matrix against the LD3 record's matrix.
// Throws MetricError if the horizon has no LD3 record.
HorizonCurve RetrospectiveCompare(const HorizonResult& result);

// Stable 64-bit FNV-1a digest of a snapshot, as 16 hex digits.
std::string SnapshotDigest(const DaySnapshot& day);

}  // namespace bap

#endif  // BAP_SIMULATOR_H_
