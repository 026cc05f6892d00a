#ifndef BAP_TOOLS_TABLE_H_
#define BAP_TOOLS_TABLE_H_

#include <string>
#include <vector>

namespace bap::cli {

// A small string table written as CSV or as a JSON array of row objects.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  // Throws std::out_of_range for an unknown column.
  int ColumnIndex(const std::string& name) const;
};

enum class TableFormat { kCsv, kJson };

TableFormat TableFormatFromName(const std::string& name);  // "csv" | "json"
const char* TableExtension(TableFormat format);            // ".csv" | ".json"

std::string ToCsv(const Table& table);
// Cells that parse as numbers are emitted as JSON numbers.
std::string ToJson(const Table& table);
std::string Render(const Table& table, TableFormat format);

// Parses either format; throws bap::InvalidConfig on malformed input.
Table TableFromCsv(const std::string& text);
Table TableFromJson(const std::string& text);

}  // namespace bap::cli

#endif  // BAP_TOOLS_TABLE_H_
