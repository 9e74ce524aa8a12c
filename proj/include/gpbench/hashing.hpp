#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>

namespace gpbench {

std::string sha256_hex(std::span<const std::uint8_t> bytes);
std::string sha256_hex(std::string_view text);

std::string base64_encode(std::span<const std::uint8_t> bytes);

}  // namespace gpbench
