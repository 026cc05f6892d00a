#include "bap/milp.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <unordered_map>

#include <fmt/format.h>

#include "bap/exact.h"

namespace bap {
namespace {

constexpr int kMaxClassIndex = 99999;
constexpr int kMaxFactoryIndex = 99;

std::string ColumnY(std::size_t c, int j) {
  return fmt::format("Y{:05d}{:02d}", c, j + 1);
}
std::string ColumnD(int i, int j) {
  return fmt::format("D{:05d}{:02d}", i + 1, j + 1);
}
std::string RowClass(std::size_t c) { return fmt::format("C{:07d}", c); }
std::string RowCap(int j) { return fmt::format("K{:07d}", j + 1); }
std::string RowPlus(int i, int j) {
  return fmt::format("P{:05d}{:02d}", i + 1, j + 1);
}
std::string RowMinus(int i, int j) {
  return fmt::format("M{:05d}{:02d}", i + 1, j + 1);
}

double Parse(const std::string& text) {
  double v = 0.0;
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end) {
    throw InvalidInstance("bad number in MPS file: '" + text + "'");
  }
  return v;
}

// Value exactly as it will appear in the file.
double Representable(double v) { return Parse(FormatMpsNumber(v)); }

// Fixed-format MPS data line: fields at columns 2, 5, 15, 25, 40, 50.
std::string DataLine(const std::string& f1, const std::string& f2,
                     const std::string& f3, const std::string& f4,
                     const std::string& f5 = "", const std::string& f6 = "") {
  std::string line = fmt::format(" {:<2} {:<8}  {:<8}  {:>12}", f1, f2, f3, f4);
  if (!f5.empty()) line += fmt::format("   {:<8}  {:>12}", f5, f6);
  while (!line.empty() && line.back() == ' ') line.pop_back();
  return line;
}

std::string MarkerLine(const char* which) {
  return fmt::format("    {:<8}  {:<8}                 {}", "MARKER",
                     "'MARKER'", which);
}

std::vector<std::string> Tokens(const std::string& line) {
  std::istringstream ss(line);
  std::vector<std::string> out;
  std::string t;
  while (ss >> t) out.push_back(t);
  return out;
}

}  // namespace

std::string FormatMpsNumber(double v) {
  if (!std::isfinite(v)) throw InvalidInstance("non-finite MPS coefficient");
  if (v == std::floor(v) && std::fabs(v) < 1e11) {
    return fmt::format("{}", static_cast<long long>(v));
  }
  for (int precision = 12; precision >= 1; --precision) {
    std::string s = fmt::format("{:.{}g}", v, precision);
    if (s.size() <= 12) return s;
  }
  throw InvalidInstance("coefficient does not fit an MPS field");
}

MpsModel BuildMilp(const DaySnapshot& day, const RecipeSiteMatrix& prev) {
  CheckSnapshot(day);
  if (prev.n_recipes() != day.n_recipes ||
      prev.n_factories() != day.n_factories) {
    throw InvalidInstance("previous matrix shape does not match the day");
  }
  const std::vector<OrderClass> classes = ClassAggregate(day);
  const int n = day.n_recipes;
  const int m = day.n_factories;
  if (static_cast<int>(classes.size()) > kMaxClassIndex + 1 ||
      n > kMaxClassIndex || m > kMaxFactoryIndex) {
    throw InvalidInstance("instance too large for eight-character MPS names");
  }
  const std::int64_t total = TotalRecipeUnits(day);
  if (total <= 0) throw InvalidInstance("day has no recipe units");

  MpsModel model;
  model.name = fmt::format("BAPLD{}", std::abs(day.lead_day));
  model.rows.push_back({"OBJ", 'N'});
  for (std::size_t c = 0; c < classes.size(); ++c) {
    model.rows.push_back({RowClass(c), 'E'});
    model.rhs[RowClass(c)] = static_cast<double>(classes[c].count());
  }
  for (int j = 0; j + 1 < m; ++j) {
    model.rows.push_back({RowCap(j), 'E'});
    model.rhs[RowCap(j)] =
        static_cast<double>(*day.capacities.at(FactoryId{j + 1}));
  }
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < m; ++j) {
      // d - a >= -p  and  d + a >= p
      model.rows.push_back({RowPlus(i, j), 'G'});
      model.rows.push_back({RowMinus(i, j), 'G'});
      const double p = static_cast<double>(prev.cell(i, j));
      if (p != 0.0) {
        model.rhs[RowPlus(i, j)] = -p;
        model.rhs[RowMinus(i, j)] = p;
      }
    }
  }

  for (std::size_t c = 0; c < classes.size(); ++c) {
    std::vector<std::pair<int, int>> entries;
    const auto& recipes = classes[c].recipes;
    for (std::size_t k = 0; k < recipes.size();) {
      std::size_t e = k;
      while (e < recipes.size() && recipes[e] == recipes[k]) ++e;
      entries.emplace_back(recipes[k].index(), static_cast<int>(e - k));
      k = e;
    }
    for (int j = 0; j < m; ++j) {
      MpsModel::Column col;
      col.name = ColumnY(c, j);
      col.integer = true;
      col.upper = classes[c].eligible.ContainsIndex(j)
                      ? static_cast<double>(classes[c].count())
                      : 0.0;
      col.coefficients.emplace_back(RowClass(c), 1.0);
      if (j + 1 < m) col.coefficients.emplace_back(RowCap(j), 1.0);
      for (const auto& [i, mult] : entries) {
        col.coefficients.emplace_back(RowPlus(i, j), -mult);
        col.coefficients.emplace_back(RowMinus(i, j), mult);
      }
      model.columns.push_back(std::move(col));
    }
  }
  const double weight = Representable(1.0 / static_cast<double>(total));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < m; ++j) {
      MpsModel::Column col;
      col.name = ColumnD(i, j);
      col.coefficients.emplace_back("OBJ", weight);
      col.coefficients.emplace_back(RowPlus(i, j), 1.0);
      col.coefficients.emplace_back(RowMinus(i, j), 1.0);
      model.columns.push_back(std::move(col));
    }
  }
  return model;
}

MilpCounts CountMilp(const MpsModel& model) {
  MilpCounts counts;
  for (const auto& col : model.columns) {
    (col.integer ? counts.integer_columns : counts.continuous_columns)++;
  }
  for (const auto& row : model.rows) {
    if (row.type != 'N') counts.constraints++;
    if (!row.name.empty() && row.name[0] == 'C') counts.classes++;
  }
  return counts;
}

void WriteMps(const MpsModel& model, std::ostream& out) {
  out << "NAME          " << model.name << "\n";
  out << "ROWS\n";
  for (const auto& row : model.rows) {
    out << " " << row.type << "  " << row.name << "\n";
  }
  out << "COLUMNS\n";
  bool in_int = false;
  for (const auto& col : model.columns) {
    if (col.integer != in_int) {
      out << MarkerLine(col.integer ? "'INTORG'" : "'INTEND'") << "\n";
      in_int = col.integer;
    }
    for (const auto& [row, value] : col.coefficients) {
      out << DataLine("", col.name, row, FormatMpsNumber(value)) << "\n";
    }
  }
  if (in_int) out << MarkerLine("'INTEND'") << "\n";
  out << "RHS\n";
  // Rows in model order for a stable file.
  for (const auto& row : model.rows) {
    auto it = model.rhs.find(row.name);
    if (it == model.rhs.end()) continue;
    out << DataLine("", "RHS", row.name, FormatMpsNumber(it->second)) << "\n";
  }
  out << "BOUNDS\n";
  for (const auto& col : model.columns) {
    if (col.lower != 0.0) {
      out << DataLine("LO", "BND", col.name, FormatMpsNumber(col.lower))
          << "\n";
    }
    if (col.upper) {
      out << DataLine("UP", "BND", col.name, FormatMpsNumber(*col.upper))
          << "\n";
    }
  }
  out << "ENDATA\n";
}

MpsModel ReadMps(std::istream& in) {
  MpsModel model;
  std::unordered_map<std::string, std::size_t> column_index;
  enum class Section { kNone, kRows, kColumns, kRhs, kBounds, kRanges, kEnd };
  Section section = Section::kNone;
  bool in_int = false;
  std::string line;
  int line_no = 0;
  auto fail = [&](const std::string& what) {
    throw InvalidInstance("MPS line " + std::to_string(line_no) + ": " + what);
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '*') continue;
    const auto tok = Tokens(line);
    if (tok.empty()) continue;
    if (line[0] != ' ') {
      const std::string& head = tok[0];
      if (head == "NAME") {
        model.name = tok.size() > 1 ? tok[1] : "";
      } else if (head == "ROWS") {
        section = Section::kRows;
      } else if (head == "COLUMNS") {
        section = Section::kColumns;
      } else if (head == "RHS") {
        section = Section::kRhs;
      } else if (head == "BOUNDS") {
        section = Section::kBounds;
      } else if (head == "RANGES") {
        fail("RANGES are not supported");
      } else if (head == "ENDATA") {
        section = Section::kEnd;
        break;
      } else {
        fail("unknown section " + head);
      }
      continue;
    }
    switch (section) {
      case Section::kRows: {
        if (tok.size() != 2 || tok[0].size() != 1 ||
            std::string("NELG").find(tok[0][0]) == std::string::npos) {
          fail("bad ROWS entry");
        }
        model.rows.push_back({tok[1], tok[0][0]});
        break;
      }
      case Section::kColumns: {
        if (tok.size() >= 3 && tok[1] == "'MARKER'") {
          if (tok[2] == "'INTORG'") {
            in_int = true;
          } else if (tok[2] == "'INTEND'") {
            in_int = false;
          } else {
            fail("bad marker");
          }
          break;
        }
        if (tok.size() != 3 && tok.size() != 5) fail("bad COLUMNS entry");
        auto [it, inserted] =
            column_index.try_emplace(tok[0], model.columns.size());
        if (inserted) {
          MpsModel::Column col;
          col.name = tok[0];
          col.integer = in_int;
          model.columns.push_back(std::move(col));
        }
        auto& col = model.columns[it->second];
        for (std::size_t k = 1; k + 1 < tok.size(); k += 2) {
          col.coefficients.emplace_back(tok[k], Parse(tok[k + 1]));
        }
        break;
      }
      case Section::kRhs: {
        if (tok.size() != 3 && tok.size() != 5) fail("bad RHS entry");
        for (std::size_t k = 1; k + 1 < tok.size(); k += 2) {
          model.rhs[tok[k]] = Parse(tok[k + 1]);
        }
        break;
      }
      case Section::kBounds: {
        if (tok.size() < 3) fail("bad BOUNDS entry");
        auto it = column_index.find(tok[2]);
        if (it == column_index.end()) fail("bound on unknown column " + tok[2]);
        auto& col = model.columns[it->second];
        const std::string& type = tok[0];
        if (type == "FR") {
          col.lower = -INFINITY;
          col.upper.reset();
          break;
        }
        if (tok.size() != 4) fail("bound without value");
        const double v = Parse(tok[3]);
        if (type == "UP") {
          col.upper = v;
        } else if (type == "LO") {
          col.lower = v;
        } else if (type == "FX") {
          col.lower = v;
          col.upper = v;
        } else {
          fail("unsupported bound type " + type);
        }
        break;
      }
      default:
        fail("data outside a section");
    }
  }
  if (section != Section::kEnd) throw InvalidInstance("MPS file lacks ENDATA");
  if (model.rows.empty() || model.rows.front().type != 'N') {
    throw InvalidInstance("MPS file must start ROWS with the objective");
  }
  return model;
}

MilpCounts ExportMilp(const DaySnapshot& day, const RecipeSiteMatrix& prev,
                      const std::string& path) {
  const MpsModel model = BuildMilp(day, prev);
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path + " for writing");
  WriteMps(model, out);
  out.flush();
  if (!out) throw IoError("write to " + path + " failed");
  return CountMilp(model);
}

std::map<std::string, double> MilpPointFromAllocation(
    const DaySnapshot& day, const RecipeSiteMatrix& prev,
    const Allocation& allocation) {
  ValidationReport report = ValidateAllocation(day, allocation);
  if (!report.ok()) throw ValidationError(std::move(report));
  const std::vector<OrderClass> classes = ClassAggregate(day);
  std::map<std::string, double> values;
  for (std::size_t c = 0; c < classes.size(); ++c) {
    std::vector<std::int64_t> y(day.n_factories, 0);
    for (OrderId id : classes[c].member_ids) {
      y[allocation.assignments.at(id).index()]++;
    }
    for (int j = 0; j < day.n_factories; ++j) {
      values[ColumnY(c, j)] = static_cast<double>(y[j]);
    }
  }
  const RecipeSiteMatrix cur = BuildRecipeSiteMatrix(day, allocation);
  for (int i = 0; i < day.n_recipes; ++i) {
    for (int j = 0; j < day.n_factories; ++j) {
      values[ColumnD(i, j)] =
          static_cast<double>(std::llabs(cur.cell(i, j) - prev.cell(i, j)));
    }
  }
  return values;
}

MilpEvaluation EvaluateMilp(const MpsModel& model,
                            const std::map<std::string, double>& values) {
  MilpEvaluation eval;
  std::unordered_map<std::string, double> activity;
  for (const auto& col : model.columns) {
    auto it = values.find(col.name);
    const double x = it == values.end() ? 0.0 : it->second;
    if (col.integer && x != std::round(x)) eval.integral = false;
    eval.max_violation = std::max(eval.max_violation, col.lower - x);
    if (col.upper) eval.max_violation = std::max(eval.max_violation, x - *col.upper);
    for (const auto& [row, coef] : col.coefficients) activity[row] += coef * x;
  }
  for (const auto& row : model.rows) {
    const double lhs = activity[row.name];
    auto it = model.rhs.find(row.name);
    const double rhs = it == model.rhs.end() ? 0.0 : it->second;
    double v = 0.0;
    switch (row.type) {
      case 'N':
        eval.objective = lhs;
        continue;
      case 'E':
        v = std::fabs(lhs - rhs);
        break;
      case 'L':
        v = lhs - rhs;
        break;
      case 'G':
        v = rhs - lhs;
        break;
    }
    eval.max_violation = std::max(eval.max_violation, v);
  }
  return eval;
}

}  // namespace bap
