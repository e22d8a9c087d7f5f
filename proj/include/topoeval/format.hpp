#pragma once

#include <charconv>
#include <cmath>
#include <cstdio>
#include <string>
#include <system_error>

#include "topoeval/error.hpp"

namespace topoeval {

/// Fixed-point rendering with the given number of decimals (e.g. "0.666667").
inline std::string format_fixed(double value, int decimals) {
    char buf[64];
    int n = std::snprintf(buf, sizeof(buf), "%.*f", decimals, value);
    if (n < 0 || n >= static_cast<int>(sizeof(buf))) fail("numeric formatting failed");
    return std::string(buf, static_cast<std::size_t>(n));
}

/// Shortest decimal string that round-trips to the same double ("0.25", "3").
inline std::string format_shortest(double value) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), value);
    if (res.ec != std::errc{}) fail("numeric formatting failed");
    return std::string(buf, res.ptr);
}

/// Rounds to `decimals` places, for stable JSON emission of derived values.
inline double round_to(double value, int decimals) {
    double scale = std::pow(10.0, decimals);
    return std::round(value * scale) / scale;
}

inline bool parse_double(const std::string& text, double& out) {
    const char* first = text.data();
    const char* last = first + text.size();
    auto res = std::from_chars(first, last, out);
    return res.ec == std::errc{} && res.ptr == last;
}

inline bool parse_size(const std::string& text, std::size_t& out) {
    const char* first = text.data();
    const char* last = first + text.size();
    auto res = std::from_chars(first, last, out);
    return res.ec == std::errc{} && res.ptr == last;
}

}  // namespace topoeval
