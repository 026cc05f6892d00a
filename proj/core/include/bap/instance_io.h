#ifndef BAP_INSTANCE_IO_H_
#define BAP_INSTANCE_IO_H_

#include <string>
#include <vector>

#include "bap/core_model.h"
#include "bap/generator.h"
#include "bap/simulator.h"
#include "bap/solve_result.h"

namespace bap {

// Instance JSON:
//   {"lead_day": -11, "n_recipes": 100, "n_factories": 3,
//    "capacities": [2500, 5000, null],
//    "eligibility_matrix": [[true, false, true], ...]   (one row per recipe)
//      or "eligibility_groups": {"bounds": [[1,29],[30,49],[50,89],[90,100]]},
//    "orders": [{"id": 1, "recipes": [30, 12], "is_real": true}, ...]}
// Writers always emit the explicit matrix. Parse errors throw InvalidInstance.
std::string SnapshotToJson(const DaySnapshot& day, int indent = -1);
DaySnapshot SnapshotFromJson(const std::string& text);

// A single instance object or an array of them.
std::string HorizonToJson(const std::vector<DaySnapshot>& days,
                          int indent = -1);
std::vector<DaySnapshot> HorizonFromJson(const std::string& text);

// {"lead_day": -11, "assignments": {"1": 1, "2": 3}}
std::string AllocationToJson(const Allocation& allocation, int indent = 2);
Allocation AllocationFromJson(const std::string& text);

// Status, exact fractions, decimals and solver statistics.
std::string SolveResultToJson(const SolveResult& result,
                              const std::string& solver, int indent = 2);

// Config files. Unknown keys and bad values throw InvalidConfig; missing
// keys keep their defaults.
GeneratorConfig GeneratorConfigFromJson(const std::string& text);
std::string GeneratorConfigToJson(const GeneratorConfig& config,
                                  int indent = 2);
ScenarioConfig ScenarioConfigFromJson(const std::string& text);
std::string ScenarioConfigToJson(const ScenarioConfig& config, int indent = 2);

// File helpers; failures throw IoError.
std::string ReadTextFile(const std::string& path);
// Writes to a temporary sibling then renames it over `path`.
void WriteTextFileAtomic(const std::string& path, const std::string& content);

}  // namespace bap

#endif  // BAP_INSTANCE_IO_H_
