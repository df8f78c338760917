#include "table.hpp"

#include <cmath>
#include <cstdio>

#include <json.hpp>

namespace sqcli {

std::string format_number(double v) {
  if (std::isnan(v))
    return "nan";
  if (std::isinf(v))
    return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.16e", v);
  return buf;
}

namespace {

std::string csv_field(const std::string &s) {
  if (s.find_first_of(",\"\n") == std::string::npos)
    return s;
  std::string q = "\"";
  for (char c : s) {
    if (c == '"')
      q += '"';
    q += c;
  }
  return q + "\"";
}

std::string as_text(const Cell &c) {
  if (const double *d = std::get_if<double>(&c))
    return format_number(*d);
  if (const std::int64_t *i = std::get_if<std::int64_t>(&c))
    return std::to_string(*i);
  return csv_field(std::get<std::string>(c));
}

} // namespace

void write_csv(const Table &t, std::ostream &out) {
  for (std::size_t k = 0; k < t.columns.size(); ++k)
    out << (k ? "," : "") << t.columns[k];
  out << "\n";
  for (const Row &r : t.rows) {
    for (std::size_t k = 0; k < r.size(); ++k)
      out << (k ? "," : "") << as_text(r[k]);
    out << "\n";
  }
}

// Numbers go through the same %.16e text as the CSV so both formats carry
// identical digits; non-finite values become null.
void write_json(const Table &t, std::ostream &out) {
  out << "{\n  \"command\": " << nlohmann::json(t.command).dump() << ",\n  \"columns\": [";
  for (std::size_t k = 0; k < t.columns.size(); ++k)
    out << (k ? ", " : "") << nlohmann::json(t.columns[k]).dump();
  out << "],\n  \"rows\": [";
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    out << (r ? ",\n    {" : "\n    {");
    const Row &row = t.rows[r];
    for (std::size_t k = 0; k < row.size(); ++k) {
      out << (k ? ", " : "") << nlohmann::json(t.columns[k]).dump() << ": ";
      const Cell &c = row[k];
      if (const double *d = std::get_if<double>(&c))
        out << (std::isfinite(*d) ? format_number(*d) : "null");
      else if (const std::int64_t *i = std::get_if<std::int64_t>(&c))
        out << *i;
      else
        out << nlohmann::json(std::get<std::string>(c)).dump();
    }
    out << "}";
  }
  out << (t.rows.empty() ? "]\n}\n" : "\n  ]\n}\n");
}

} // namespace sqcli
