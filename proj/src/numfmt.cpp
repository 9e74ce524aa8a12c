#include "gpbench/numfmt.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>

namespace gpbench {

std::string format_number(double v) {
    if (v == 0.0) return "0";  // folds -0
    std::array<char, 64> buf{};
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), res.ptr);
}

std::optional<double> parse_number(std::string_view text) {
    if (text.empty()) return std::nullopt;
    if (text.front() == '+') text.remove_prefix(1);
    double v = 0.0;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
    if (res.ec != std::errc{} || res.ptr != text.data() + text.size() || !std::isfinite(v)) return std::nullopt;
    return v;
}

std::string format_fixed(double v, int decimals) {
    if (v == 0.0) v = 0.0;
    std::array<char, 64> buf{};
    const int n = std::snprintf(buf.data(), buf.size(), "%.*f", decimals, v);
    std::string out(buf.data(), static_cast<std::size_t>(n));
    if (out.front() == '-' && out.find_first_not_of("-0.") == std::string::npos) out.erase(0, 1);
    return out;
}

}  // namespace gpbench
