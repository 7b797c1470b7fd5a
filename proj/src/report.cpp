#include "bergkern/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>

#include "bergkern/errors.hpp"

namespace bergkern {

void Report::add_row(std::vector<Cell> row) {
  if (row.size() != columns.size())
    raise(ErrorKind::Validation, "report row has " + std::to_string(row.size()) + " cells for " +
                                     std::to_string(columns.size()) + " columns");
  rows.push_back(std::move(row));
}

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

namespace {

std::string cell_text(const Cell& c) {
  struct V {
    std::string operator()(long long v) const { return std::to_string(v); }
    std::string operator()(double v) const { return format_double(v); }
    std::string operator()(const std::string& v) const { return v; }
    std::string operator()(bool v) const { return v ? "true" : "false"; }
  };
  return std::visit(V{}, c);
}

Json cell_json(const Cell& c) {
  struct V {
    Json operator()(long long v) const { return v; }
    Json operator()(double v) const { return std::isfinite(v) ? Json(v) : Json(format_double(v)); }
    Json operator()(const std::string& v) const { return v; }
    Json operator()(bool v) const { return v; }
  };
  return std::visit(V{}, c);
}

}  // namespace

void write_csv(std::ostream& out, const Report& r) {
  for (std::size_t i = 0; i < r.columns.size(); ++i) out << (i ? "," : "") << csv_field(r.columns[i]);
  out << "\n";
  for (const auto& row : r.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << csv_field(cell_text(row[i]));
    out << "\n";
  }
}

Json report_json(const Report& r) {
  Json j;
  j["schema"] = kSchema;
  j["command"] = r.command;
  j["config"] = r.config;
  Json rows = Json::array();
  for (const auto& row : r.rows) {
    Json o = Json::object();
    for (std::size_t i = 0; i < row.size(); ++i) o[r.columns[i]] = cell_json(row[i]);
    rows.push_back(std::move(o));
  }
  j["rows"] = std::move(rows);
  j["summary"] = r.summary;
  return j;
}

void write_json(std::ostream& out, const Report& r) { out << report_json(r).dump(2) << "\n"; }

void emit_report(const Report& r, const std::string& path, const std::string& format) {
  if (format != "csv" && format != "json") raise(ErrorKind::Validation, "format must be csv or json");
  if (path.empty() || path == "-") {
    format == "csv" ? write_csv(std::cout, r) : write_json(std::cout, r);
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) raise(ErrorKind::Io, "cannot write report to '" + path + "'");
  format == "csv" ? write_csv(out, r) : write_json(out, r);
  if (!out) raise(ErrorKind::Io, "write failed for '" + path + "'");
}

}  // namespace bergkern
