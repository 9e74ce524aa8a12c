#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace gpbench {

// Sub-pixel coordinate; y grows downward. Draw calls round to the pixel grid.
struct Point {
    double x = 0.0;
    double y = 0.0;
};

class RenderError : public std::out_of_range {
public:
    using std::out_of_range::out_of_range;
};

// Fixed 100x100 grayscale raster. Intensity 0 is background, 1 is full ink;
// every stored value is kept in [0, 1].
class Canvas {
public:
    static constexpr int kWidth = 100;
    static constexpr int kHeight = 100;
    static constexpr int kPixelCount = kWidth * kHeight;

    Canvas() { pixels_.fill(0.0); }

    int width() const { return kWidth; }
    int height() const { return kHeight; }

    static bool contains(int x, int y) { return x >= 0 && x < kWidth && y >= 0 && y < kHeight; }

    double at(int x, int y) const { return pixels_[index(x, y)]; }
    void set(int x, int y, double v);

    bool inked(int x, int y, double threshold = 0.5) const { return at(x, y) >= threshold; }
    int count_inked(double threshold = 0.5) const;

    std::span<const double> pixels() const { return pixels_; }

    friend bool operator==(const Canvas&, const Canvas&) = default;

private:
    static std::size_t index(int x, int y) {
        if (!contains(x, y)) throw RenderError("pixel (" + std::to_string(x) + "," + std::to_string(y) + ") outside canvas");
        return static_cast<std::size_t>(y) * kWidth + static_cast<std::size_t>(x);
    }

    std::array<double, kPixelCount> pixels_;
};

Canvas new_canvas();

// Integer Bresenham between the rounded endpoints.
void draw_line(Canvas& canvas, Point p0, Point p1);

// Midpoint-circle outline, or every pixel with squared distance <= r^2 when filled.
void draw_circle(Canvas& canvas, Point center, int radius, bool filled);

// Cubic Bezier sampled at kBezierSteps parameter steps, consecutive samples joined by draw_line.
inline constexpr int kBezierSteps = 200;
void draw_cubic_bezier(Canvas& canvas, Point c0, Point c1, Point c2, Point c3);

void draw_rect(Canvas& canvas, Point top_left, int w, int h, bool filled);

// Toggles one pixel against its surroundings: ink on background, background on ink.
void draw_dot(Canvas& canvas, Point p);

// Additive uniform noise in [0, 0.05], clamped to [0, 1].
inline constexpr double kNoiseAmplitude = 0.05;
void apply_noise(Canvas& canvas, std::uint64_t seed);

}  // namespace gpbench
