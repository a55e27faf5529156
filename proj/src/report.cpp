#include "permix/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "permix/errors.hpp"

namespace permix {

void Table::add_row(std::vector<Json> row) {
  if (row.size() != columns.size()) {
    throw DomainError("table row has " + std::to_string(row.size()) + " cells for " +
                      std::to_string(columns.size()) + " columns");
  }
  rows.push_back(std::move(row));
}

std::string format_number(double x) {
  if (!std::isfinite(x)) return "null";
  if (x == 0.0) return "0";  // folds -0
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

namespace {

void write_json(const Json& j, std::ostream& out, int indent) {
  const std::string pad(static_cast<std::size_t>(indent + 2), ' ');
  const std::string close_pad(static_cast<std::size_t>(indent), ' ');
  switch (j.type()) {
    case Json::value_t::object: {
      if (j.empty()) {
        out << "{}";
        return;
      }
      out << "{\n";
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out << ",\n";
        first = false;
        out << pad << Json(it.key()).dump() << ": ";
        write_json(it.value(), out, indent + 2);
      }
      out << "\n" << close_pad << "}";
      return;
    }
    case Json::value_t::array: {
      if (j.empty()) {
        out << "[]";
        return;
      }
      // Arrays of scalars stay on one line (table rows, point lists).
      const bool flat = std::none_of(j.begin(), j.end(), [](const Json& e) { return e.is_structured(); });
      if (flat) {
        out << "[";
        for (std::size_t k = 0; k < j.size(); ++k) {
          if (k) out << ", ";
          write_json(j[k], out, indent);
        }
        out << "]";
        return;
      }
      out << "[\n";
      for (std::size_t k = 0; k < j.size(); ++k) {
        if (k) out << ",\n";
        out << pad;
        write_json(j[k], out, indent + 2);
      }
      out << "\n" << close_pad << "]";
      return;
    }
    case Json::value_t::number_float:
      out << format_number(j.get<double>());
      return;
    default:
      out << j.dump();
      return;
  }
}

std::string csv_cell(const Json& j) {
  if (j.is_number_float()) {
    const double x = j.get<double>();
    return std::isfinite(x) ? format_number(x) : "";
  }
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string quoted = "\"";
    for (char c : s) {
      if (c == '"') quoted += '"';
      quoted += c;
    }
    return quoted + "\"";
  }
  if (j.is_null()) return "";
  return j.dump();
}

}  // namespace

std::string to_json(const Report& report, const std::string& version) {
  Json doc = Json::object();
  doc["schema_version"] = kSchemaVersion;
  doc["version"] = version;
  doc["command"] = report.command;
  doc["config"] = report.config;
  doc["summary"] = report.summary;
  Json table = Json::object();
  table["columns"] = report.table.columns;
  Json rows = Json::array();
  for (const auto& r : report.table.rows) rows.push_back(Json(r));
  table["rows"] = std::move(rows);
  doc["table"] = std::move(table);
  if (report.runtime_ms) doc["runtime_ms"] = *report.runtime_ms;

  std::ostringstream out;
  write_json(doc, out, 0);
  out << "\n";
  return out.str();
}

std::string to_csv(const Table& table) {
  std::ostringstream out;
  for (std::size_t c = 0; c < table.columns.size(); ++c) out << (c ? "," : "") << table.columns[c];
  out << "\n";
  for (const auto& row : table.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) out << (c ? "," : "") << csv_cell(row[c]);
    out << "\n";
  }
  return out.str();
}

void emit_table(const Report& report, Format format, const std::string& version, std::ostream& out) {
  out << (format == Format::json ? to_json(report, version) : to_csv(report.table));
  if (!out) throw Error("failed to write report");
}

}  // namespace permix
