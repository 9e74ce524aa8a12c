#pragma once

#include "gpbench/canvas.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace gpbench {

enum class ImageFormat { Pgm, Png };

// 8-bit grayscale, byte = round(255 * (1 - intensity)) so ink renders dark on white.
// PGM is binary P5; PNG is color type 0, bit depth 8, no alpha.
std::vector<std::uint8_t> encode_image(const Canvas& canvas, ImageFormat format);

// Reads back the two formats produced above. Intensities come back quantized
// to the 8-bit grid; PNG decoding covers 8-bit grayscale, non-interlaced only.
Canvas decode_image(std::span<const std::uint8_t> bytes);

std::uint8_t quantize(double intensity);

}  // namespace gpbench
