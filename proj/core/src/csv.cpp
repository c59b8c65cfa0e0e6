#include "dhc/csv.hpp"

#include <cstdio>

namespace dhc {

std::string format_double(double x) {
    if (x == 0.0) return "0";  // folds -0
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    std::string s(buf);
    for (char& c : s) {
        if (c == ',') c = '.';
    }
    return s;
}

}  // namespace dhc
