#ifndef BAP_MILP_H_
#define BAP_MILP_H_

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "bap/core_model.h"

namespace bap {

// A linear model in the shape of an MPS file. Coefficients are stored as
// written (at most 12 characters), so write/read round-trips exactly.
struct MpsModel {
  struct Row {
    std::string name;
    char type = 'E';  // N, E, L or G
    bool operator==(const Row&) const = default;
  };
  struct Column {
    std::string name;
    bool integer = false;
    double lower = 0.0;
    std::optional<double> upper;  // nullopt: +infinity
    std::vector<std::pair<std::string, double>> coefficients;
    bool operator==(const Column&) const = default;
  };

  std::string name;
  std::vector<Row> rows;  // the objective row comes first
  std::vector<Column> columns;
  std::map<std::string, double> rhs;

  const std::string& objective_row() const { return rows.front().name; }
  bool operator==(const MpsModel&) const = default;
};

struct MilpCounts {
  std::int64_t classes = 0;
  std::int64_t integer_columns = 0;     // classes * m
  std::int64_t continuous_columns = 0;  // n * m
  std::int64_t constraints = 0;  // classes + bounded factories + 2 * n * m
};

// Linearised model over class counts y(c, j) and deviations d(i, j):
//   min sum d(i, j) / total_units
//   sum_j y(c, j) = |c|,  sum_c y(c, j) = C_j for bounded j,
//   d(i, j) >= +-(sum_c mult(c, i) y(c, j) - prev(i, j)).
// Column names: Y<class:5><factory:2>, D<recipe:5><factory:2>.
// Classes follow ClassAggregate order.
MpsModel BuildMilp(const DaySnapshot& day, const RecipeSiteMatrix& prev);
MilpCounts CountMilp(const MpsModel& model);

// Shortest decimal of at most 12 characters (fixed MPS number field).
std::string FormatMpsNumber(double v);

void WriteMps(const MpsModel& model, std::ostream& out);
// Reads fixed or free MPS as produced by WriteMps. Throws InvalidInstance.
MpsModel ReadMps(std::istream& in);

// Writes the model to `path`; throws IoError.
MilpCounts ExportMilp(const DaySnapshot& day, const RecipeSiteMatrix& prev,
                      const std::string& path);

// Column values implied by an allocation (y from class counts, d = |dev|).
std::map<std::string, double> MilpPointFromAllocation(
    const DaySnapshot& day, const RecipeSiteMatrix& prev,
    const Allocation& allocation);

struct MilpEvaluation {
  double objective = 0.0;
  double max_violation = 0.0;  // rows and bounds
  bool integral = true;
};
// Missing columns count as zero.
MilpEvaluation EvaluateMilp(const MpsModel& model,
                            const std::map<std::string, double>& values);

}  // namespace bap

#endif  // BAP_MILP_H_
