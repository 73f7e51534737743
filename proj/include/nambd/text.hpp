#pragma once

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <string>

namespace nambd {

// Shortest decimal string that round-trips to the same double.
inline std::string format_double(double value) {
    char buf[64];
    if (value == static_cast<double>(static_cast<long long>(value)) &&
        std::abs(value) < 1e15) {
        std::snprintf(buf, sizeof(buf), "%.0f", value);
        return buf;
    }
    for (int prec = 1; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof(buf), "%.*g", prec, value);
        if (std::strtod(buf, nullptr) == value) break;
    }
    return buf;
}

}  // namespace nambd
