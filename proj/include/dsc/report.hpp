#pragma once

#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

// Tabular evaluation reports with stable column order and CSV/JSON emission.

namespace dsc {

struct EvaluationReport {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  void add_row(std::vector<std::string> row) {
    if (row.size() != columns.size()) {
      throw std::invalid_argument("report row width does not match the column count");
    }
    rows.push_back(std::move(row));
  }
};

enum class ReportFormat { kCsv, kJson };

inline ReportFormat parse_report_format(const std::string& name) {
  if (name == "csv") return ReportFormat::kCsv;
  if (name == "json") return ReportFormat::kJson;
  throw std::invalid_argument("unknown report format: " + name);
}

// Fixed 6-decimal rendering used for all rates and mass values in reports.
inline std::string format_rate(double value) {
  std::ostringstream out;
  out.setf(std::ios::fixed);
  out.precision(6);
  out << value;
  return out.str();
}

inline std::string emit_report(const EvaluationReport& report, ReportFormat format) {
  if (format == ReportFormat::kCsv) {
    std::string out;
    for (std::size_t c = 0; c < report.columns.size(); ++c) {
      if (c) out += ",";
      out += report.columns[c];
    }
    out += "\n";
    for (const auto& row : report.rows) {
      for (std::size_t c = 0; c < row.size(); ++c) {
        if (c) out += ",";
        out += row[c];
      }
      out += "\n";
    }
    return out;
  }
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const auto& row : report.rows) {
    nlohmann::ordered_json obj = nlohmann::ordered_json::object();
    for (std::size_t c = 0; c < report.columns.size(); ++c) {
      obj[report.columns[c]] = row[c];
    }
    arr.push_back(std::move(obj));
  }
  return arr.dump(2) + "\n";
}

}  // namespace dsc
