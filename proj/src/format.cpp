#include "nnosc/format.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>

namespace nnosc {

std::string format_real(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.*g", kOutputDigits, v);
    return buf;
}

double round_to_output(double v) {
    if (!std::isfinite(v)) return v;
    return std::strtod(format_real(v).c_str(), nullptr);
}

}  // namespace nnosc
