#pragma once

#include <charconv>
#include <string>

#include "sbd/error.hpp"

namespace sbd {

// Shortest decimal that parses back to exactly the same double.
inline std::string format_double(double value) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    if (ec != std::errc())
        throw DataError("failed to format a floating-point value");
    return std::string(buf, ptr);
}

} // namespace sbd
