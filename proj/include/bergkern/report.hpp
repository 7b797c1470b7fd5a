#pragma once

#include <ostream>
#include <string>
#include <variant>
#include <vector>

#include "bergkern/config.hpp"

namespace bergkern {

inline constexpr const char* kSchema = "bergkern/1";

using Cell = std::variant<long long, double, std::string, bool>;

struct Report {
  std::string command;
  Json config;
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
  Json summary = Json::object();

  void add_row(std::vector<Cell> row);
};

// %.17g; nan and inf spelled out.
std::string format_double(double x);
// RFC 4180 quoting when the field holds a comma, quote or line break.
std::string csv_field(const std::string& s);

void write_csv(std::ostream& out, const Report& r);
Json report_json(const Report& r);
void write_json(std::ostream& out, const Report& r);
// format is "csv" or "json"; an empty path writes to stdout.
void emit_report(const Report& r, const std::string& path, const std::string& format);

}  // namespace bergkern
