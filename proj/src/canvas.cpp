#include "gpbench/canvas.hpp"

#include "gpbench/random.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

namespace gpbench {

namespace {

struct Pixel {
    int x;
    int y;
};

Pixel to_pixel(Point p, const char* what) {
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) throw RenderError(std::string(what) + ": non-finite coordinate");
    const Pixel px{static_cast<int>(std::lround(p.x)), static_cast<int>(std::lround(p.y))};
    if (!Canvas::contains(px.x, px.y)) {
        throw RenderError(std::string(what) + ": point (" + std::to_string(p.x) + "," + std::to_string(p.y) +
                          ") outside canvas");
    }
    return px;
}

void bresenham(Canvas& canvas, Pixel a, Pixel b) {
    const int dx = std::abs(b.x - a.x);
    const int dy = -std::abs(b.y - a.y);
    const int sx = a.x < b.x ? 1 : -1;
    const int sy = a.y < b.y ? 1 : -1;
    int err = dx + dy;
    int x = a.x;
    int y = a.y;
    for (;;) {
        canvas.set(x, y, 1.0);
        if (x == b.x && y == b.y) break;
        const int e2 = 2 * err;
        if (e2 >= dy) {
            err += dy;
            x += sx;
        }
        if (e2 <= dx) {
            err += dx;
            y += sy;
        }
    }
}

}  // namespace

void Canvas::set(int x, int y, double v) { pixels_[index(x, y)] = std::clamp(v, 0.0, 1.0); }

int Canvas::count_inked(double threshold) const {
    return static_cast<int>(std::count_if(pixels_.begin(), pixels_.end(), [&](double v) { return v >= threshold; }));
}

Canvas new_canvas() { return Canvas{}; }

void draw_line(Canvas& canvas, Point p0, Point p1) {
    bresenham(canvas, to_pixel(p0, "draw_line"), to_pixel(p1, "draw_line"));
}

void draw_circle(Canvas& canvas, Point center, int radius, bool filled) {
    if (radius < 0) throw RenderError("draw_circle: negative radius");
    const Pixel c = to_pixel(center, "draw_circle");
    if (!Canvas::contains(c.x - radius, c.y - radius) || !Canvas::contains(c.x + radius, c.y + radius)) {
        throw RenderError("draw_circle: circle exceeds canvas");
    }
    if (filled) {
        const int r2 = radius * radius;
        for (int dy = -radius; dy <= radius; ++dy)
            for (int dx = -radius; dx <= radius; ++dx)
                if (dx * dx + dy * dy <= r2) canvas.set(c.x + dx, c.y + dy, 1.0);
        return;
    }
    int x = radius;
    int y = 0;
    int d = 1 - radius;
    while (x >= y) {
        const std::array<Pixel, 8> octants{{{x, y}, {y, x}, {-y, x}, {-x, y}, {-x, -y}, {-y, -x}, {y, -x}, {x, -y}}};
        for (const auto& o : octants) canvas.set(c.x + o.x, c.y + o.y, 1.0);
        ++y;
        if (d < 0) {
            d += 2 * y + 1;
        } else {
            --x;
            d += 2 * (y - x) + 1;
        }
    }
}

void draw_cubic_bezier(Canvas& canvas, Point c0, Point c1, Point c2, Point c3) {
    for (const Point& p : {c0, c1, c2, c3}) to_pixel(p, "draw_cubic_bezier");
    auto eval = [&](double t) {
        const double u = 1.0 - t;
        const double b0 = u * u * u;
        const double b1 = 3.0 * u * u * t;
        const double b2 = 3.0 * u * t * t;
        const double b3 = t * t * t;
        return Point{b0 * c0.x + b1 * c1.x + b2 * c2.x + b3 * c3.x, b0 * c0.y + b1 * c1.y + b2 * c2.y + b3 * c3.y};
    };
    Pixel prev = to_pixel(c0, "draw_cubic_bezier");
    for (int i = 1; i <= kBezierSteps; ++i) {
        const Pixel next = to_pixel(eval(static_cast<double>(i) / kBezierSteps), "draw_cubic_bezier");
        bresenham(canvas, prev, next);
        prev = next;
    }
}

void draw_rect(Canvas& canvas, Point top_left, int w, int h, bool filled) {
    if (w < 1 || h < 1) throw RenderError("draw_rect: empty rectangle");
    const Pixel tl = to_pixel(top_left, "draw_rect");
    const int x1 = tl.x + w - 1;
    const int y1 = tl.y + h - 1;
    if (!Canvas::contains(x1, y1)) throw RenderError("draw_rect: rectangle exceeds canvas");
    for (int y = tl.y; y <= y1; ++y) {
        for (int x = tl.x; x <= x1; ++x) {
            const bool edge = y == tl.y || y == y1 || x == tl.x || x == x1;
            if (filled || edge) canvas.set(x, y, 1.0);
        }
    }
}

void draw_dot(Canvas& canvas, Point p) {
    const Pixel px = to_pixel(p, "draw_dot");
    canvas.set(px.x, px.y, canvas.inked(px.x, px.y) ? 0.0 : 1.0);
}

void apply_noise(Canvas& canvas, std::uint64_t seed) {
    Rng rng(derive_seed(seed, label_hash("noise")));
    for (int y = 0; y < Canvas::kHeight; ++y)
        for (int x = 0; x < Canvas::kWidth; ++x) canvas.set(x, y, canvas.at(x, y) + kNoiseAmplitude * rng.uniform());
}

}  // namespace gpbench
