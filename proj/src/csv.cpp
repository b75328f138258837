#include "mmcsim/csv.hpp"

#include <cstdio>

#include "mmcsim/scenario.hpp"

namespace mmcsim {

std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

void write_csv(std::ostream& os, const TimeSeries& ts) {
  for (size_t c = 0; c < ts.columns.size(); ++c) {
    if (c) os << ',';
    os << ts.columns[c];
  }
  os << '\n';
  for (const auto& row : ts.rows) {
    for (size_t c = 0; c < row.size(); ++c) {
      if (c) os << ',';
      os << format_number(row[c]);
    }
    os << '\n';
  }
}

}  // namespace mmcsim
