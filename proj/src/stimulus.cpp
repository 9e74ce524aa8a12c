#include "gpbench/stimulus.hpp"

#include "gpbench/hashing.hpp"
#include "gpbench/image_codec.hpp"
#include "gpbench/layout.hpp"
#include "gpbench/numfmt.hpp"
#include "gpbench/random.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

namespace gpbench {

namespace L = layout;

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

Point ray_end(Point origin, double degrees, double length) {
    // 0 degrees points up, angles grow clockwise (y grows downward).
    return {origin.x + length * std::sin(degrees * kDeg), origin.y - length * std::cos(degrees * kDeg)};
}

void require_experiment(TaskId task, Experiment e, const char* op) {
    if (experiment_of(task) != e)
        throw std::invalid_argument(std::string(op) + ": task " + task_name(task) + " is not an " +
                                    std::string(experiment_name(e)) + " variant");
}

// A knockout dot needs a background pixel whose 8 neighbours are background
// too, so the toggled pixel stays isolated.
bool clear_neighbourhood(const Canvas& c, int x, int y) {
    for (int dy = -1; dy <= 1; ++dy)
        for (int dx = -1; dx <= 1; ++dx)
            if (!Canvas::contains(x + dx, y + dy) || c.inked(x + dx, y + dy)) return false;
    return true;
}

// ---------------------------------------------------------------- E1

StimulusParams sample_position(TaskId task, Rng& rng) {
    StimulusParams p;
    const int size = static_cast<int>(rng.integer(L::kBlockMin, L::kBlockMax));
    p.add("value", static_cast<double>(rng.integer(0, L::kPositionRange)));
    p.add("block_size", size);
    p.add("block_x", static_cast<double>(rng.integer(L::kBlockXMin, L::kBlockXMax + 1 - size)));
    const int top = task == TaskId::PositionCommonScale
                        ? L::kCommonAxisTop
                        : static_cast<int>(rng.integer(L::kNonAlignedTopMin, L::kNonAlignedTopMax));
    p.add("axis_top", top);
    return p;
}

Scene render_position(const StimulusParams& p) {
    Canvas c;
    const int top = p.get_int("axis_top");
    const int value = p.get_int("value");
    const int size = p.get_int("block_size");
    const double ax = L::kAxisX;
    draw_line(c, {ax, static_cast<double>(top)}, {ax, static_cast<double>(top + L::kAxisLength - 1)});
    for (int t = 0; t <= L::kPositionRange; t += L::kTickStep) {
        const double y = top + t;
        draw_line(c, {static_cast<double>(L::kTickLeft), y}, {ax - 1, y});
    }
    draw_rect(c, {p.get("block_x"), static_cast<double>(top + value)}, size, size, true);
    return {c, GroundTruth::scalar(value)};
}

StimulusParams sample_length(Rng& rng) {
    StimulusParams p;
    const int len = static_cast<int>(rng.integer(L::kLengthMin, L::kLengthMax));
    p.add("value", len);
    p.add("x", static_cast<double>(rng.integer(L::kMargin, 99 - L::kMargin)));
    p.add("top", static_cast<double>(rng.integer(L::kMargin, 100 - L::kMargin - len)));
    return p;
}

Scene render_length(const StimulusParams& p) {
    Canvas c;
    const int len = p.get_int("value");
    const double x = p.get("x");
    const double top = p.get("top");
    draw_line(c, {x, top}, {x, top + len - 1});
    return {c, GroundTruth::scalar(len)};
}

StimulusParams sample_direction(Rng& rng) {
    StimulusParams p;
    p.add("value", static_cast<double>(rng.integer(0, 359)));
    p.add("cx", static_cast<double>(rng.integer(L::kRayCenterMin, L::kRayCenterMax)));
    p.add("cy", static_cast<double>(rng.integer(L::kRayCenterMin, L::kRayCenterMax)));
    return p;
}

Scene render_direction(const StimulusParams& p) {
    Canvas c;
    const Point o{p.get("cx"), p.get("cy")};
    const int half = L::kOriginMarker / 2;
    draw_rect(c, {o.x - half, o.y - half}, L::kOriginMarker, L::kOriginMarker, true);
    draw_line(c, o, ray_end(o, p.get("value"), L::kRayLength));
    return {c, GroundTruth::scalar(p.get("value"))};
}

StimulusParams sample_angle(Rng& rng) {
    StimulusParams p;
    p.add("value", static_cast<double>(rng.integer(0, 90)));
    p.add("base", static_cast<double>(rng.integer(0, 359)));
    p.add("cx", static_cast<double>(rng.integer(L::kRayCenterMin, L::kRayCenterMax)));
    p.add("cy", static_cast<double>(rng.integer(L::kRayCenterMin, L::kRayCenterMax)));
    return p;
}

Scene render_angle(const StimulusParams& p) {
    Canvas c;
    const Point o{p.get("cx"), p.get("cy")};
    draw_line(c, o, ray_end(o, p.get("base"), L::kRayLength));
    draw_line(c, o, ray_end(o, p.get("base") + p.get("value"), L::kRayLength));
    return {c, GroundTruth::scalar(p.get("value"))};
}

StimulusParams sample_area(Rng& rng) {
    StimulusParams p;
    const int r = static_cast<int>(rng.integer(L::kRadiusMin, L::kRadiusMax));
    p.add("radius", r);
    p.add("cx", static_cast<double>(rng.integer(r + L::kMargin, 99 - L::kMargin - r)));
    p.add("cy", static_cast<double>(rng.integer(r + L::kMargin, 99 - L::kMargin - r)));
    return p;
}

Scene render_area(const StimulusParams& p) {
    Canvas c;
    const int r = p.get_int("radius");
    draw_circle(c, {p.get("cx"), p.get("cy")}, r, true);
    return {c, GroundTruth::scalar(std::numbers::pi * r * r)};
}

StimulusParams sample_volume(Rng& rng) {
    StimulusParams p;
    const int s = static_cast<int>(rng.integer(L::kCubeMin, L::kCubeMax));
    const int d = s / 2;
    p.add("side", s);
    p.add("x", static_cast<double>(rng.integer(L::kMargin, 99 - L::kMargin - (s - 1) - d)));
    p.add("y", static_cast<double>(rng.integer(L::kMargin + d, 99 - L::kMargin - (s - 1))));
    return p;
}

Scene render_volume(const StimulusParams& p) {
    Canvas c;
    const int s = p.get_int("side");
    const double d = s / 2;
    const double x = p.get("x");
    const double y = p.get("y");
    const double e = s - 1;
    draw_rect(c, {x + d, y - d}, s, s, false);
    draw_rect(c, {x, y}, s, s, false);
    for (const auto& [cx, cy] : {std::pair{0.0, 0.0}, {e, 0.0}, {0.0, e}, {e, e}})
        draw_line(c, {x + cx, y + cy}, {x + cx + d, y + cy - d});
    return {c, GroundTruth::scalar(static_cast<double>(s) * s * s)};
}

std::array<Point, 4> curve_points(const StimulusParams& p) {
    return {{{p.get("x0"), p.get("y0")}, {p.get("x1"), p.get("y1")}, {p.get("x2"), p.get("y2")},
             {p.get("x3"), p.get("y3")}}};
}

StimulusParams sample_curvature(Rng& rng) {
    // Endpoints on the left/right thirds, inner controls pulled toward the
    // middle; curves whose peak curvature leaves the legal range are redrawn.
    for (;;) {
        const Point p0{rng.uniform(5, 20), rng.uniform(30, 70)};
        const Point p3{rng.uniform(80, 95), rng.uniform(30, 70)};
        const Point p1{p0.x + rng.uniform(10, 30), std::clamp(p0.y + rng.uniform(-35, 35), 3.0, 96.0)};
        const Point p2{p3.x - rng.uniform(10, 30), std::clamp(p3.y + rng.uniform(-35, 35), 3.0, 96.0)};
        const double k = bezier_max_curvature({p0, p1, p2, p3});
        if (!(k <= L::kCurvatureMax)) continue;
        StimulusParams p;
        const std::array<Point, 4> pts{p0, p1, p2, p3};
        for (int i = 0; i < 4; ++i) {
            p.add("x" + std::to_string(i), pts[i].x);
            p.add("y" + std::to_string(i), pts[i].y);
        }
        return p;
    }
}

Scene render_curvature(const StimulusParams& p) {
    Canvas c;
    const auto pts = curve_points(p);
    draw_cubic_bezier(c, pts[0], pts[1], pts[2], pts[3]);
    return {c, GroundTruth::scalar(bezier_max_curvature(pts))};
}

StimulusParams sample_shading(Rng& rng) {
    StimulusParams p;
    p.add("value", static_cast<double>(rng.integer(0, 100)));
    p.add("px", static_cast<double>(rng.integer(L::kPatchMin, L::kPatchMax)));
    p.add("py", static_cast<double>(rng.integer(L::kPatchMin, L::kPatchMax)));
    p.add("dither_seed", static_cast<double>(rng.integer(0, (std::int64_t{1} << 40) - 1)));
    return p;
}

Scene render_shading(const StimulusParams& p) {
    Canvas c;
    const int px = p.get_int("px");
    const int py = p.get_int("py");
    const int percent = p.get_int("value");
    draw_rect(c, {px - 1.0, py - 1.0}, L::kPatch + 2, L::kPatch + 2, false);
    constexpr int cells = L::kPatch * L::kPatch;
    const int inked = percent * cells / 100;
    std::vector<int> order(cells);
    std::iota(order.begin(), order.end(), 0);
    Rng rng(static_cast<std::uint64_t>(p.get("dither_seed")));
    for (int i = 0; i < inked; ++i) {
        const auto j = static_cast<std::size_t>(rng.integer(i, cells - 1));
        std::swap(order[static_cast<std::size_t>(i)], order[j]);
        const int cell = order[static_cast<std::size_t>(i)];
        c.set(px + cell % L::kPatch, py + cell / L::kPatch, 1.0);
    }
    return {c, GroundTruth::scalar(percent)};
}

// ---------------------------------------------------------------- E2

StimulusParams segments_params(const std::array<int, 5>& seg) {
    StimulusParams p;
    for (int i = 0; i < 5; ++i) p.add("v" + std::to_string(i), seg[static_cast<std::size_t>(i)]);
    return p;
}

std::array<int, 5> segments_of(const StimulusParams& p) {
    std::array<int, 5> seg{};
    for (int i = 0; i < 5; ++i) seg[static_cast<std::size_t>(i)] = p.get_int("v" + std::to_string(i));
    return seg;
}

std::size_t argmax(std::span<const int> v) {
    return static_cast<std::size_t>(std::distance(v.begin(), std::max_element(v.begin(), v.end())));
}

Scene render_pie(const StimulusParams& p) {
    Canvas c;
    const auto seg = segments_of(p);
    const Point center{L::kPieCenter, L::kPieCenter};
    draw_circle(c, center, L::kPieRadius, false);
    int cumulative = 0;
    for (int v : seg) {
        draw_line(c, center, ray_end(center, 3.6 * cumulative, L::kPieRadius));
        cumulative += v;
    }
    const std::size_t m = argmax(seg);
    const int start = std::accumulate(seg.begin(), seg.begin() + static_cast<std::ptrdiff_t>(m), 0);
    const double bisector = 3.6 * (start + seg[m] / 2.0);
    const double half = 3.6 * seg[m] / 2.0 * kDeg;
    const double centroid = 2.0 * L::kPieRadius * std::sin(half) / (3.0 * half);
    // Walk outward from the sector centroid until the dot sits in clean background.
    for (int step = 0; step < L::kPieRadius; ++step) {
        for (double r : {centroid + step, centroid - step}) {
            const Point d = ray_end(center, bisector, r);
            const int x = static_cast<int>(std::lround(d.x));
            const int y = static_cast<int>(std::lround(d.y));
            if (r > 1 && r < L::kPieRadius - 1 && clear_neighbourhood(c, x, y)) {
                draw_dot(c, {static_cast<double>(x), static_cast<double>(y)});
                return {c, GroundTruth::vector(position_angle_truth(TaskId::Pie, seg))};
            }
        }
    }
    throw RenderError("pie: no clean pixel for the marker dot");
}

Scene render_bar(const StimulusParams& p) {
    Canvas c;
    const auto seg = segments_of(p);
    for (std::size_t i = 0; i < seg.size(); ++i) {
        const int h = seg[i] * L::kE2PixelsPerUnit;
        const double x = L::kE2BarLeft + static_cast<double>(i) * (L::kE2BarWidth + L::kE2BarGap);
        draw_rect(c, {x, static_cast<double>(L::kE2Baseline - h + 1)}, L::kE2BarWidth, h, true);
    }
    const std::size_t m = argmax(seg);
    const double x = L::kE2BarLeft + static_cast<double>(m) * (L::kE2BarWidth + L::kE2BarGap) + L::kE2BarWidth / 2;
    draw_dot(c, {x, static_cast<double>(L::kE2Baseline - seg[m] + 1)});
    return {c, GroundTruth::vector(position_angle_truth(TaskId::Bar, seg))};
}

// ---------------------------------------------------------------- E3

constexpr int kE3Elements = 10;

bool is_grouped(TaskId t) { return t == TaskId::Type1 || t == TaskId::Type3; }

StimulusParams sample_position_length(TaskId task, Rng& rng) {
    int a = 0;
    int b = 0;
    switch (task) {
        case TaskId::Type1: {  // adjacent bars within one group
            const int g = static_cast<int>(rng.integer(0, 1));
            const int k = static_cast<int>(rng.integer(0, 3));
            a = g * 5 + k;
            b = a + 1;
            break;
        }
        case TaskId::Type3: {  // one bar from each group
            a = static_cast<int>(rng.integer(0, 4));
            b = 5 + static_cast<int>(rng.integer(0, 4));
            break;
        }
        case TaskId::Type2:  // bottom segments of two stacks (aligned)
        case TaskId::Type4: {  // top segments of two stacks (non-aligned)
            const int off = task == TaskId::Type2 ? 0 : 1;
            const int s0 = static_cast<int>(rng.integer(0, 4));
            int s1 = static_cast<int>(rng.integer(0, 3));
            if (s1 >= s0) ++s1;
            a = 2 * std::min(s0, s1) + off;
            b = 2 * std::max(s0, s1) + off;
            break;
        }
        case TaskId::Type5:  // both segments of the left stack
            a = 0;
            b = 1;
            break;
        default:
            throw std::invalid_argument("position-length: not an E3 task");
    }
    const int i = static_cast<int>(rng.integer(1, 10));
    int j = static_cast<int>(rng.integer(1, 9));
    if (j >= i) ++j;
    StimulusParams p;
    p.add("mark_a", a);
    p.add("mark_b", b);
    for (int e = 0; e < kE3Elements; ++e) {
        const int level = e == a ? i : e == b ? j : static_cast<int>(rng.integer(1, 10));
        p.add("h" + std::to_string(e), level);
    }
    return p;
}

struct Box {
    int x;
    int top;
    int w;
    int h;
};

Scene render_position_length(TaskId task, const StimulusParams& p) {
    Canvas c;
    std::array<Box, kE3Elements> boxes{};
    std::array<int, kE3Elements> level{};
    for (int e = 0; e < kE3Elements; ++e) level[static_cast<std::size_t>(e)] = p.get_int("h" + std::to_string(e));

    if (is_grouped(task)) {
        constexpr int pitch = L::kGroupedBarWidth + L::kGroupedBarGap;
        constexpr int group_span = 5 * pitch - L::kGroupedBarGap + L::kGroupGap;
        for (int e = 0; e < kE3Elements; ++e) {
            const int h = cm_pixel_height(level[static_cast<std::size_t>(e)]);
            const int x = L::kGroupedLeft + (e / 5) * group_span + (e % 5) * pitch;
            boxes[static_cast<std::size_t>(e)] = {x, L::kE3Baseline - h + 1, L::kGroupedBarWidth, h};
        }
    } else {
        constexpr int pitch = L::kStackedBarWidth + L::kStackedBarGap;
        for (int s = 0; s < kE3Elements / 2; ++s) {
            const int hb = cm_pixel_height(level[static_cast<std::size_t>(2 * s)]);
            const int ht = cm_pixel_height(level[static_cast<std::size_t>(2 * s + 1)]);
            const int x = L::kStackedLeft + s * pitch;
            const int bottom_top = L::kE3Baseline - hb + 1;
            boxes[static_cast<std::size_t>(2 * s)] = {x, bottom_top, L::kStackedBarWidth, hb};
            // The upper segment shares the boundary row with the lower one.
            boxes[static_cast<std::size_t>(2 * s + 1)] = {x, bottom_top - ht + 1, L::kStackedBarWidth, ht};
        }
    }
    for (const Box& b : boxes) draw_rect(c, {static_cast<double>(b.x), static_cast<double>(b.top)}, b.w, b.h, false);

    const int a = p.get_int("mark_a");
    const int b = p.get_int("mark_b");
    for (int e : {a, b}) {
        const Box& box = boxes[static_cast<std::size_t>(e)];
        draw_dot(c, {static_cast<double>(box.x + box.w / 2), static_cast<double>(box.top + (box.h - 1) / 2)});
    }
    const double va = cm_scale(level[static_cast<std::size_t>(a)]);
    const double vb = cm_scale(level[static_cast<std::size_t>(b)]);
    return {c, GroundTruth::scalar(std::min(va, vb) / std::max(va, vb))};
}

// ---------------------------------------------------------------- E4

StimulusParams sample_framed(Rng& rng) {
    StimulusParams p;
    const int left = static_cast<int>(rng.integer(L::kE4LengthMin, L::kE4LengthMax));
    int right = static_cast<int>(rng.integer(L::kE4LengthMin, L::kE4LengthMax - 1));
    if (right >= left) ++right;
    p.add("len_left", left);
    p.add("len_right", right);
    p.add("x_left", static_cast<double>(rng.integer(L::kE4LeftXMin, L::kE4LeftXMax)));
    p.add("x_right", static_cast<double>(rng.integer(L::kE4RightXMin, L::kE4RightXMax)));
    p.add("bottom_left", static_cast<double>(rng.integer(L::kE4BottomMin, L::kE4BottomMax)));
    p.add("bottom_right", static_cast<double>(rng.integer(L::kE4BottomMin, L::kE4BottomMax)));
    return p;
}

Scene render_framed(TaskId task, const StimulusParams& p) {
    Canvas c;
    const bool framed = task == TaskId::Framed;
    for (const char* side : {"left", "right"}) {
        const std::string s(side);
        const int len = p.get_int("len_" + s);
        const int x = p.get_int("x_" + s);
        const int bottom = p.get_int("bottom_" + s);
        draw_rect(c, {static_cast<double>(x), static_cast<double>(bottom - len + 1)}, L::kE4BarWidth, len, true);
        if (framed) {
            const int fx = x - L::kFramePad - 1;
            const int fw = L::kE4BarWidth + 2 * L::kFramePad + 2;
            draw_rect(c, {static_cast<double>(fx), static_cast<double>(bottom - L::kFrameInner)}, fw,
                      L::kFrameInner + 2, false);
        }
    }
    return {c, GroundTruth::vector({p.get("len_left"), p.get("len_right")})};
}

// ---------------------------------------------------------------- E5

int base_count(TaskId t) {
    switch (t) {
        case TaskId::Base10: return 10;
        case TaskId::Base100: return 100;
        case TaskId::Base1000: return 1000;
        default: throw std::invalid_argument("point cloud: not an E5 task");
    }
}

StimulusParams sample_point_cloud(TaskId task, Rng& rng) {
    StimulusParams p;
    p.add("base", base_count(task));
    p.add("added", static_cast<double>(rng.integer(1, 10)));
    p.add("layout_seed", static_cast<double>(rng.integer(0, (std::int64_t{1} << 40) - 1)));
    return p;
}

Scene render_point_cloud(const StimulusParams& p) {
    Canvas c;
    constexpr int side = (L::kLatticeMax - L::kLatticeMin) / L::kLatticeStep + 1;
    constexpr int sites = side * side;
    const int total = p.get_int("base") + p.get_int("added");
    if (total > sites) throw RenderError("point cloud: more dots than lattice sites");
    std::vector<int> order(sites);
    std::iota(order.begin(), order.end(), 0);
    Rng rng(static_cast<std::uint64_t>(p.get("layout_seed")));
    for (int i = 0; i < total; ++i) {
        const auto j = static_cast<std::size_t>(rng.integer(i, sites - 1));
        std::swap(order[static_cast<std::size_t>(i)], order[j]);
        const int site = order[static_cast<std::size_t>(i)];
        draw_dot(c, {static_cast<double>(L::kLatticeMin + (site % side) * L::kLatticeStep),
                     static_cast<double>(L::kLatticeMin + (site / side) * L::kLatticeStep)});
    }
    return {c, GroundTruth::scalar(p.get("added"))};
}

}  // namespace

// ---------------------------------------------------------------- public

double StimulusParams::get(std::string_view name) const {
    for (const auto& e : entries_)
        if (e.name == name) return e.value;
    throw std::out_of_range("stimulus parameter '" + std::string(name) + "' missing");
}

bool StimulusParams::has(std::string_view name) const {
    return std::any_of(entries_.begin(), entries_.end(), [&](const Param& e) { return e.name == name; });
}

std::string StimulusParams::fingerprint() const {
    std::string out;
    for (const auto& e : entries_) {
        if (!out.empty()) out += ';';
        out += e.name;
        out += '=';
        out += format_number(e.value);
    }
    return out;
}

TruthRange truth_range(TaskId task) {
    switch (task) {
        case TaskId::PositionCommonScale:
        case TaskId::PositionNonAligned: return {0, 60};
        case TaskId::Length: return {0, 100};
        case TaskId::Direction: return {0, 359};
        case TaskId::Angle: return {0, 90};
        case TaskId::Area: return {3.14, 5026.55};
        case TaskId::Volume: return {1, 8000};
        case TaskId::Curvature: return {0.0, 0.088};
        case TaskId::Shading: return {0, 100};
        case TaskId::Pie:
        case TaskId::Bar: return {0, 1};
        case TaskId::Type1:
        case TaskId::Type2:
        case TaskId::Type3:
        case TaskId::Type4:
        case TaskId::Type5: return {0, 1};
        case TaskId::Framed:
        case TaskId::Unframed: return {49, 60};
        case TaskId::Base10:
        case TaskId::Base100:
        case TaskId::Base1000: return {1, 10};
    }
    throw std::invalid_argument("truth_range: unknown task");
}

StimulusParams sample_params(TaskId task, std::uint64_t seed) {
    Rng rng(derive_seed(seed, label_hash("params")));
    switch (task) {
        case TaskId::PositionCommonScale:
        case TaskId::PositionNonAligned: return sample_position(task, rng);
        case TaskId::Length: return sample_length(rng);
        case TaskId::Direction: return sample_direction(rng);
        case TaskId::Angle: return sample_angle(rng);
        case TaskId::Area: return sample_area(rng);
        case TaskId::Volume: return sample_volume(rng);
        case TaskId::Curvature: return sample_curvature(rng);
        case TaskId::Shading: return sample_shading(rng);
        case TaskId::Pie:
        case TaskId::Bar: return segments_params(sample_segments(derive_seed(seed, label_hash("segments"))));
        case TaskId::Type1:
        case TaskId::Type2:
        case TaskId::Type3:
        case TaskId::Type4:
        case TaskId::Type5: return sample_position_length(task, rng);
        case TaskId::Framed:
        case TaskId::Unframed: return sample_framed(rng);
        case TaskId::Base10:
        case TaskId::Base100:
        case TaskId::Base1000: return sample_point_cloud(task, rng);
    }
    throw std::invalid_argument("sample_params: unknown task");
}

Scene render_scene(TaskId task, const StimulusParams& params) {
    switch (task) {
        case TaskId::PositionCommonScale:
        case TaskId::PositionNonAligned: return render_position(params);
        case TaskId::Length: return render_length(params);
        case TaskId::Direction: return render_direction(params);
        case TaskId::Angle: return render_angle(params);
        case TaskId::Area: return render_area(params);
        case TaskId::Volume: return render_volume(params);
        case TaskId::Curvature: return render_curvature(params);
        case TaskId::Shading: return render_shading(params);
        case TaskId::Pie: return render_pie(params);
        case TaskId::Bar: return render_bar(params);
        case TaskId::Type1:
        case TaskId::Type2:
        case TaskId::Type3:
        case TaskId::Type4:
        case TaskId::Type5: return render_position_length(task, params);
        case TaskId::Framed:
        case TaskId::Unframed: return render_framed(task, params);
        case TaskId::Base10:
        case TaskId::Base100:
        case TaskId::Base1000: return render_point_cloud(params);
    }
    throw std::invalid_argument("render_scene: unknown task");
}

Stimulus generate(TaskId task, std::uint64_t seed) {
    StimulusParams params = sample_params(task, seed);
    Scene scene = render_scene(task, params);
    apply_noise(scene.canvas, derive_seed(seed, label_hash("noise-field")));

    std::string name = task_name(task);
    std::vector<std::uint8_t> digest_input(name.begin(), name.end());
    digest_input.push_back('\n');
    const auto pgm = encode_image(scene.canvas, ImageFormat::Pgm);
    digest_input.insert(digest_input.end(), pgm.begin(), pgm.end());
    for (double v : scene.truth.values()) {
        const std::string s = format_number(v) + ",";
        digest_input.insert(digest_input.end(), s.begin(), s.end());
    }
    std::string id = sha256_hex(digest_input).substr(0, 16);
    return Stimulus{std::move(id), task, scene.canvas, std::move(scene.truth), std::move(params), seed};
}

Stimulus gen_elementary(TaskId variant, std::uint64_t seed) {
    require_experiment(variant, Experiment::E1, "gen_elementary");
    return generate(variant, seed);
}

Stimulus gen_position_angle(TaskId variant, std::uint64_t seed) {
    require_experiment(variant, Experiment::E2, "gen_position_angle");
    return generate(variant, seed);
}

Stimulus gen_position_length(TaskId variant, std::uint64_t seed) {
    require_experiment(variant, Experiment::E3, "gen_position_length");
    return generate(variant, seed);
}

Stimulus gen_framed_bars(TaskId variant, std::uint64_t seed) {
    require_experiment(variant, Experiment::E4, "gen_framed_bars");
    return generate(variant, seed);
}

Stimulus gen_point_cloud(TaskId variant, std::uint64_t seed) {
    require_experiment(variant, Experiment::E5, "gen_point_cloud");
    return generate(variant, seed);
}

std::array<int, 5> sample_segments(std::uint64_t seed) {
    // Uniform compositions of 100 into five positive parts (four distinct cut
    // points in 1..99), rejected until every part is in [3, 39] and the
    // maximum is unique.
    Rng rng(seed);
    for (;;) {
        std::array<int, 4> cuts{};
        for (std::size_t i = 0; i < cuts.size();) {
            const int c = static_cast<int>(rng.integer(1, 99));
            if (std::find(cuts.begin(), cuts.begin() + static_cast<std::ptrdiff_t>(i), c) ==
                cuts.begin() + static_cast<std::ptrdiff_t>(i))
                cuts[i++] = c;
        }
        std::sort(cuts.begin(), cuts.end());
        const std::array<int, 5> seg{cuts[0], cuts[1] - cuts[0], cuts[2] - cuts[1], cuts[3] - cuts[2], 100 - cuts[3]};
        const auto [lo, hi] = std::minmax_element(seg.begin(), seg.end());
        if (*lo < 3 || *hi > 39) continue;
        if (std::count(seg.begin(), seg.end(), *hi) != 1) continue;
        return seg;
    }
}

double cm_scale(int i) {
    if (i < 1 || i > 10) throw std::out_of_range("cm_scale: index must be in 1..10");
    return 10.0 * std::pow(10.0, (i - 1) / 12.0);
}

int cm_pixel_height(int i) { return static_cast<int>(std::lround(cm_scale(i) * L::kE3PixelsPerUnit)); }

double bezier_max_curvature(const std::array<Point, 4>& c) {
    auto kappa = [&](double t) {
        const double u = 1.0 - t;
        const double dx = 3 * (u * u * (c[1].x - c[0].x) + 2 * u * t * (c[2].x - c[1].x) + t * t * (c[3].x - c[2].x));
        const double dy = 3 * (u * u * (c[1].y - c[0].y) + 2 * u * t * (c[2].y - c[1].y) + t * t * (c[3].y - c[2].y));
        const double ddx = 6 * (u * (c[2].x - 2 * c[1].x + c[0].x) + t * (c[3].x - 2 * c[2].x + c[1].x));
        const double ddy = 6 * (u * (c[2].y - 2 * c[1].y + c[0].y) + t * (c[3].y - 2 * c[2].y + c[1].y));
        const double speed2 = dx * dx + dy * dy;
        if (speed2 == 0.0) return std::numeric_limits<double>::infinity();
        return std::abs(dx * ddy - dy * ddx) / (speed2 * std::sqrt(speed2));
    };
    constexpr int kSamples = 2000;
    int best = 0;
    double best_k = kappa(0.0);
    for (int i = 1; i <= kSamples; ++i) {
        const double k = kappa(static_cast<double>(i) / kSamples);
        if (k > best_k) {
            best_k = k;
            best = i;
        }
    }
    if (!std::isfinite(best_k)) return best_k;
    // Golden-section refinement inside the bracketing sample interval.
    double lo = std::max(0, best - 1) / static_cast<double>(kSamples);
    double hi = std::min(kSamples, best + 1) / static_cast<double>(kSamples);
    constexpr double g = 0.6180339887498949;
    double m1 = hi - g * (hi - lo);
    double m2 = lo + g * (hi - lo);
    double k1 = kappa(m1);
    double k2 = kappa(m2);
    for (int it = 0; it < 60; ++it) {
        if (k1 < k2) {
            lo = m1;
            m1 = m2;
            k1 = k2;
            m2 = lo + g * (hi - lo);
            k2 = kappa(m2);
        } else {
            hi = m2;
            m2 = m1;
            k2 = k1;
            m1 = hi - g * (hi - lo);
            k1 = kappa(m1);
        }
    }
    return std::max({best_k, k1, k2});
}

std::vector<double> position_angle_truth(TaskId variant, std::span<const int> seg) {
    if (seg.size() != 5) throw std::invalid_argument("position-angle: expected five segments");
    const std::size_t m = argmax(seg);
    const double max = seg[m];
    std::vector<double> out{1.0};
    if (variant == TaskId::Pie) {
        // Sectors run clockwise from 12 o'clock; read counterclockwise from the mark.
        for (std::size_t step = 1; step < 5; ++step) out.push_back(seg[(m + 5 - step) % 5] / max);
    } else if (variant == TaskId::Bar) {
        for (std::size_t i = 0; i < 5; ++i)
            if (i != m) out.push_back(seg[i] / max);
    } else {
        throw std::invalid_argument("position-angle: not an E2 task");
    }
    return out;
}

}  // namespace gpbench
