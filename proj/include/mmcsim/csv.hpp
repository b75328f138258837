#pragma once

#include <ostream>
#include <string>

namespace mmcsim {

struct TimeSeries;

/// 9 significant digits, shortest form; deterministic across runs.
std::string format_number(double v);

/// Header row then data rows, comma separated, '\n' line endings.
void write_csv(std::ostream& os, const TimeSeries& ts);

}  // namespace mmcsim
