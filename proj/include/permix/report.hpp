#pragma once

// Machine-readable experiment reports. JSON keeps insertion order and prints
// floats with 12 significant digits; CSV carries the table only.

#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

namespace permix {

using Json = nlohmann::ordered_json;

/// Bumped on any breaking change to the report layout.
inline constexpr int kSchemaVersion = 1;

enum class Format { json, csv };

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Json>> rows;

  void add_row(std::vector<Json> row);
};

struct Report {
  std::string command;
  Json config = Json::object();
  Json summary = Json::object();
  Table table;
  std::optional<double> runtime_ms;
};

/// "%.12g"; non-finite values become "null" in JSON and empty cells in CSV.
std::string format_number(double x);

std::string to_json(const Report& report, const std::string& version);
std::string to_csv(const Table& table);

void emit_table(const Report& report, Format format, const std::string& version, std::ostream& out);

}  // namespace permix
