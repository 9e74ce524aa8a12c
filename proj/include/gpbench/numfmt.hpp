#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace gpbench {

// Shortest decimal text that parses back to the identical double.
std::string format_number(double v);

// Whole-string parse of a decimal literal; surrounding whitespace not allowed.
std::optional<double> parse_number(std::string_view text);

std::string format_fixed(double v, int decimals);

}  // namespace gpbench
