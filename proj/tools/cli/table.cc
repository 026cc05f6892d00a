#include "table.h"

#include <algorithm>
#include <cstdlib>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "bap/errors.h"

namespace bap::cli {
namespace {

std::string CsvField(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

bool IsNumber(const std::string& s) {
  if (s.empty()) return false;
  char* end = nullptr;
  std::strtod(s.c_str(), &end);
  return end == s.c_str() + s.size() &&
         s.find_first_of("xXnNiI") == std::string::npos;
}

}  // namespace

int Table::ColumnIndex(const std::string& name) const {
  auto it = std::find(columns.begin(), columns.end(), name);
  if (it == columns.end()) throw std::out_of_range("no column " + name);
  return static_cast<int>(it - columns.begin());
}

TableFormat TableFormatFromName(const std::string& name) {
  if (name == "csv") return TableFormat::kCsv;
  if (name == "json") return TableFormat::kJson;
  throw InvalidConfig("unknown table format '" + name + "'");
}

const char* TableExtension(TableFormat format) {
  return format == TableFormat::kCsv ? ".csv" : ".json";
}

std::string ToCsv(const Table& table) {
  std::string out;
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t k = 0; k < cells.size(); ++k) {
      if (k) out += ',';
      out += CsvField(cells[k]);
    }
    out += '\n';
  };
  line(table.columns);
  for (const auto& row : table.rows) line(row);
  return out;
}

std::string ToJson(const Table& table) {
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (const auto& row : table.rows) {
    nlohmann::ordered_json obj = nlohmann::ordered_json::object();
    for (std::size_t k = 0; k < table.columns.size() && k < row.size(); ++k) {
      const std::string& cell = row[k];
      if (IsNumber(cell)) {
        obj[table.columns[k]] = nlohmann::ordered_json::parse(cell, nullptr,
                                                              false);
        if (obj[table.columns[k]].is_discarded()) {
          obj[table.columns[k]] = std::strtod(cell.c_str(), nullptr);
        }
      } else {
        obj[table.columns[k]] = cell;
      }
    }
    rows.push_back(std::move(obj));
  }
  return rows.dump(2) + "\n";
}

std::string Render(const Table& table, TableFormat format) {
  return format == TableFormat::kCsv ? ToCsv(table) : ToJson(table);
}

Table TableFromCsv(const std::string& text) {
  std::vector<std::vector<std::string>> lines;
  std::vector<std::string> cells;
  std::string cell;
  bool quoted = false;
  bool any = false;
  for (std::size_t k = 0; k < text.size(); ++k) {
    const char c = text[k];
    if (quoted) {
      if (c == '"' && k + 1 < text.size() && text[k + 1] == '"') {
        cell += '"';
        ++k;
      } else if (c == '"') {
        quoted = false;
      } else {
        cell += c;
      }
      continue;
    }
    if (c == '"') {
      quoted = true;
      any = true;
    } else if (c == ',') {
      cells.push_back(std::move(cell));
      cell.clear();
      any = true;
    } else if (c == '\n') {
      cells.push_back(std::move(cell));
      cell.clear();
      lines.push_back(std::move(cells));
      cells.clear();
      any = false;
    } else if (c != '\r') {
      cell += c;
      any = true;
    }
  }
  if (quoted) throw InvalidConfig("CSV has an unterminated quote");
  if (any) {
    cells.push_back(std::move(cell));
    lines.push_back(std::move(cells));
  }
  if (lines.empty()) throw InvalidConfig("CSV has no header");
  Table table;
  table.columns = lines.front();
  for (std::size_t r = 1; r < lines.size(); ++r) {
    if (lines[r].size() != table.columns.size()) {
      throw InvalidConfig("CSV row " + std::to_string(r) + " has " +
                          std::to_string(lines[r].size()) + " fields, expected " +
                          std::to_string(table.columns.size()));
    }
    table.rows.push_back(std::move(lines[r]));
  }
  return table;
}

Table TableFromJson(const std::string& text) {
  nlohmann::ordered_json j;
  try {
    j = nlohmann::ordered_json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw InvalidConfig(std::string("table JSON: ") + e.what());
  }
  if (!j.is_array()) throw InvalidConfig("table JSON must be an array");
  Table table;
  for (const auto& obj : j) {
    if (!obj.is_object()) throw InvalidConfig("table rows must be objects");
    if (table.columns.empty()) {
      for (const auto& [key, value] : obj.items()) table.columns.push_back(key);
    }
    std::vector<std::string> row;
    for (const std::string& col : table.columns) {
      if (!obj.contains(col)) throw InvalidConfig("table row lacks " + col);
      const auto& v = obj.at(col);
      row.push_back(v.is_string() ? v.get<std::string>() : v.dump());
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

}  // namespace bap::cli
