#pragma once

#include <charconv>
#include <string>

namespace palmgrid {

/// Shortest decimal text that reads back to the same double.
inline std::string format_double(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

} // namespace palmgrid
