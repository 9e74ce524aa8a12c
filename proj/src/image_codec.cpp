#include "gpbench/image_codec.hpp"

#include <zlib.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <stdexcept>
#include <string>

namespace gpbench {

namespace {

constexpr std::uint8_t kPngSignature[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1A, '\n'};

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    out.push_back(static_cast<std::uint8_t>(v >> 24));
    out.push_back(static_cast<std::uint8_t>(v >> 16));
    out.push_back(static_cast<std::uint8_t>(v >> 8));
    out.push_back(static_cast<std::uint8_t>(v));
}

std::uint32_t get_u32(std::span<const std::uint8_t> b, std::size_t at) {
    if (at + 4 > b.size()) throw std::runtime_error("png: truncated");
    return (std::uint32_t{b[at]} << 24) | (std::uint32_t{b[at + 1]} << 16) | (std::uint32_t{b[at + 2]} << 8) |
           std::uint32_t{b[at + 3]};
}

void put_chunk(std::vector<std::uint8_t>& out, const char type[4], std::span<const std::uint8_t> data) {
    put_u32(out, static_cast<std::uint32_t>(data.size()));
    const std::size_t crc_start = out.size();
    out.insert(out.end(), type, type + 4);
    out.insert(out.end(), data.begin(), data.end());
    const uLong crc = crc32(0L, out.data() + crc_start, static_cast<uInt>(out.size() - crc_start));
    put_u32(out, static_cast<std::uint32_t>(crc));
}

std::vector<std::uint8_t> encode_png(const Canvas& canvas) {
    std::vector<std::uint8_t> out(std::begin(kPngSignature), std::end(kPngSignature));

    std::vector<std::uint8_t> ihdr;
    put_u32(ihdr, Canvas::kWidth);
    put_u32(ihdr, Canvas::kHeight);
    ihdr.insert(ihdr.end(), {8, 0, 0, 0, 0});  // depth 8, grayscale, deflate, filter 0, no interlace
    put_chunk(out, "IHDR", ihdr);

    std::vector<std::uint8_t> raw;
    raw.reserve(static_cast<std::size_t>(Canvas::kHeight) * (Canvas::kWidth + 1));
    for (int y = 0; y < Canvas::kHeight; ++y) {
        raw.push_back(0);
        for (int x = 0; x < Canvas::kWidth; ++x) raw.push_back(quantize(canvas.at(x, y)));
    }
    uLongf packed_size = compressBound(static_cast<uLong>(raw.size()));
    std::vector<std::uint8_t> packed(packed_size);
    if (compress2(packed.data(), &packed_size, raw.data(), static_cast<uLong>(raw.size()), 9) != Z_OK)
        throw std::runtime_error("png: deflate failed");
    packed.resize(packed_size);
    put_chunk(out, "IDAT", packed);
    put_chunk(out, "IEND", {});
    return out;
}

Canvas from_bytes(std::span<const std::uint8_t> gray) {
    Canvas c;
    for (int y = 0; y < Canvas::kHeight; ++y)
        for (int x = 0; x < Canvas::kWidth; ++x)
            c.set(x, y, 1.0 - gray[static_cast<std::size_t>(y) * Canvas::kWidth + x] / 255.0);
    return c;
}

Canvas decode_png(std::span<const std::uint8_t> b) {
    std::size_t at = sizeof(kPngSignature);
    std::vector<std::uint8_t> idat;
    bool header_ok = false;
    while (at + 8 <= b.size()) {
        const std::uint32_t len = get_u32(b, at);
        const std::string type(reinterpret_cast<const char*>(b.data() + at + 4), 4);
        const std::size_t data_at = at + 8;
        if (data_at + len + 4 > b.size()) throw std::runtime_error("png: truncated chunk");
        if (type == "IHDR") {
            header_ok = get_u32(b, data_at) == Canvas::kWidth && get_u32(b, data_at + 4) == Canvas::kHeight &&
                        b[data_at + 8] == 8 && b[data_at + 9] == 0 && b[data_at + 12] == 0;
        } else if (type == "IDAT") {
            idat.insert(idat.end(), b.begin() + static_cast<std::ptrdiff_t>(data_at),
                        b.begin() + static_cast<std::ptrdiff_t>(data_at + len));
        } else if (type == "IEND") {
            break;
        }
        at = data_at + len + 4;
    }
    if (!header_ok) throw std::runtime_error("png: unsupported header");
    std::vector<std::uint8_t> raw(static_cast<std::size_t>(Canvas::kHeight) * (Canvas::kWidth + 1));
    uLongf raw_size = static_cast<uLongf>(raw.size());
    if (uncompress(raw.data(), &raw_size, idat.data(), static_cast<uLong>(idat.size())) != Z_OK ||
        raw_size != raw.size())
        throw std::runtime_error("png: inflate failed");
    std::vector<std::uint8_t> gray;
    gray.reserve(Canvas::kPixelCount);
    for (int y = 0; y < Canvas::kHeight; ++y) {
        const std::size_t row = static_cast<std::size_t>(y) * (Canvas::kWidth + 1);
        if (raw[row] != 0) throw std::runtime_error("png: unsupported filter type");
        gray.insert(gray.end(), raw.begin() + static_cast<std::ptrdiff_t>(row + 1),
                    raw.begin() + static_cast<std::ptrdiff_t>(row + 1 + Canvas::kWidth));
    }
    return from_bytes(gray);
}

}  // namespace

std::uint8_t quantize(double intensity) {
    return static_cast<std::uint8_t>(std::lround(255.0 * (1.0 - std::clamp(intensity, 0.0, 1.0))));
}

std::vector<std::uint8_t> encode_image(const Canvas& canvas, ImageFormat format) {
    if (format == ImageFormat::Png) return encode_png(canvas);
    static constexpr char kHeader[] = "P5\n100 100\n255\n";
    std::vector<std::uint8_t> out(kHeader, kHeader + sizeof(kHeader) - 1);
    out.reserve(out.size() + Canvas::kPixelCount);
    for (double v : canvas.pixels()) out.push_back(quantize(v));
    return out;
}

Canvas decode_image(std::span<const std::uint8_t> bytes) {
    if (bytes.size() >= sizeof(kPngSignature) && std::memcmp(bytes.data(), kPngSignature, sizeof(kPngSignature)) == 0)
        return decode_png(bytes);
    static constexpr std::string_view kHeader = "P5\n100 100\n255\n";
    if (bytes.size() != kHeader.size() + Canvas::kPixelCount ||
        std::memcmp(bytes.data(), kHeader.data(), kHeader.size()) != 0)
        throw std::runtime_error("pgm: expected a 100x100 8-bit P5 image");
    return from_bytes(bytes.subspan(kHeader.size()));
}

}  // namespace gpbench
