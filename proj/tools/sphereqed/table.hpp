#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <variant>
#include <vector>

namespace sqcli {

using Cell = std::variant<double, std::int64_t, std::string>;
using Row = std::vector<Cell>;

struct Table {
  std::string command;
  std::vector<std::string> columns;
  std::vector<Row> rows;
  bool failures = false; // some row carries an error
};

// Doubles print as %.16e (17 significant digits), non-finite as nan/inf.
std::string format_number(double v);
void write_csv(const Table &t, std::ostream &out);
void write_json(const Table &t, std::ostream &out);

} // namespace sqcli
