#pragma once

#include <string>

namespace dhc {

/// Shortest text that round-trips a double: "%.17g", '.' separator regardless of locale.
std::string format_double(double x);

}  // namespace dhc
