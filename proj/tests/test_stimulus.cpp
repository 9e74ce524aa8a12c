#include "doctest.h"

#include "oracles.hpp"

#include "gpbench/stimulus.hpp"

#include <cmath>
#include <map>
#include <set>

using namespace gpbench;

namespace {

// Rendering without noise, straight from sampled parameters.
Canvas clean(TaskId t, std::uint64_t seed) { return render_scene(t, sample_params(t, seed)).canvas; }

StimulusParams with(TaskId t, std::uint64_t seed, const std::string& name, double value) {
    StimulusParams in = sample_params(t, seed);
    StimulusParams out;
    for (const auto& p : in.entries()) out.add(p.name, p.name == name ? value : p.value);
    return out;
}

}  // namespace

TEST_SUITE("stimulus-gen") {

TEST_CASE("task ids") {
    CHECK(list_tasks().size() == kTaskCount);
    CHECK(list_tasks().size() == 21);
    CHECK(tasks_of(Experiment::E1).size() == 9);
    CHECK(tasks_of(Experiment::E2).size() == 2);
    CHECK(tasks_of(Experiment::E3).size() == 5);
    CHECK(tasks_of(Experiment::E4).size() == 2);
    CHECK(tasks_of(Experiment::E5).size() == 3);
    for (TaskId t : list_tasks()) CHECK(parse_task(task_name(t)) == t);
    CHECK(task_name(TaskId::Type4) == "E3/type4");
    CHECK_FALSE(parse_task("E6/whatever").has_value());
}

TEST_CASE("per-experiment generators reject foreign variants") {
    CHECK_THROWS_AS(gen_elementary(TaskId::Pie, 1), std::invalid_argument);
    CHECK_THROWS_AS(gen_position_angle(TaskId::Length, 1), std::invalid_argument);
    CHECK_THROWS_AS(gen_position_length(TaskId::Framed, 1), std::invalid_argument);
    CHECK_THROWS_AS(gen_framed_bars(TaskId::Type1, 1), std::invalid_argument);
    CHECK_THROWS_AS(gen_point_cloud(TaskId::Bar, 1), std::invalid_argument);
    CHECK(gen_elementary(TaskId::Length, 1).task == TaskId::Length);
}

TEST_CASE("every task: truth in range, deterministic, noise keeps the threshold picture") {
    for (TaskId t : list_tasks()) {
        CAPTURE(task_name(t));
        const TruthRange r = truth_range(t);
        for (std::uint64_t seed = 0; seed < 60; ++seed) {
            const Stimulus s = generate(t, seed);
            const std::size_t arity = t == TaskId::Pie || t == TaskId::Bar                 ? 5
                                      : t == TaskId::Framed || t == TaskId::Unframed ? 2
                                                                                      : 1;
            REQUIRE(s.ground_truth.size() == arity);
            for (double v : s.ground_truth.values()) {
                CHECK(v >= r.lo);
                CHECK(v <= r.hi);
            }
            const Stimulus again = generate(t, seed);
            CHECK(again.id == s.id);
            CHECK(again.canvas == s.canvas);
            CHECK(again.params == s.params);
            CHECK(s.id.size() == 16);

            const Canvas pre = clean(t, seed);
            for (int y = 0; y < 100; ++y)
                for (int x = 0; x < 100; ++x) REQUIRE(pre.inked(x, y) == s.canvas.inked(x, y));
            for (int i = 0; i < 100; ++i) {
                // margin of at least 2 px on every side
                REQUIRE_FALSE(pre.inked(i, 0));
                REQUIRE_FALSE(pre.inked(i, 1));
                REQUIRE_FALSE(pre.inked(i, 98));
                REQUIRE_FALSE(pre.inked(i, 99));
                REQUIRE_FALSE(pre.inked(0, i));
                REQUIRE_FALSE(pre.inked(1, i));
                REQUIRE_FALSE(pre.inked(98, i));
                REQUIRE_FALSE(pre.inked(99, i));
            }
        }
    }
}

TEST_CASE("area and volume range endpoints") {
    StimulusParams big;
    big.add("radius", 40);
    big.add("cx", 50);
    big.add("cy", 50);
    CHECK(std::abs(render_scene(TaskId::Area, big).truth.value() - 5026.55) < 0.01);
    auto small = with(TaskId::Area, 3, "radius", 1);
    CHECK(std::abs(render_scene(TaskId::Area, small).truth.value() - 3.14159) < 1e-5);

    StimulusParams cube;
    cube.add("side", 20);
    cube.add("x", 10);
    cube.add("y", 30);
    CHECK(render_scene(TaskId::Volume, cube).truth.value() == 8000.0);
}

TEST_CASE("area: filled-circle pixel count matches an inside-test scan") {
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        const auto p = sample_params(TaskId::Area, seed);
        const Canvas c = render_scene(TaskId::Area, p).canvas;
        const int r = p.get_int("radius"), cx = p.get_int("cx"), cy = p.get_int("cy");
        int expect = 0;
        for (int y = 0; y < 100; ++y)
            for (int x = 0; x < 100; ++x) expect += (x - cx) * (x - cx) + (y - cy) * (y - cy) <= r * r;
        CHECK(c.count_inked() == expect);
    }
}

TEST_CASE("length roundtrip") {
    for (std::uint64_t seed = 0; seed < 300; ++seed) {
        const Stimulus s = gen_elementary(TaskId::Length, seed);
        CHECK(oracle::measure_length(clean(TaskId::Length, seed)) == static_cast<int>(s.ground_truth.value()));
        CHECK(oracle::measure_length(s.canvas) == static_cast<int>(s.ground_truth.value()));
    }
}

TEST_CASE("position roundtrip, both variants") {
    std::set<int> tops;
    for (TaskId t : {TaskId::PositionCommonScale, TaskId::PositionNonAligned}) {
        for (std::uint64_t seed = 0; seed < 300; ++seed) {
            const Stimulus s = gen_elementary(t, seed);
            CHECK(oracle::measure_position(s.canvas) == static_cast<int>(s.ground_truth.value()));
            if (t == TaskId::PositionNonAligned) tops.insert(s.params.get_int("axis_top"));
            else CHECK(s.params.get_int("axis_top") == 20);
        }
    }
    CHECK(tops.size() > 10);
}

TEST_CASE("shading roundtrip") {
    for (std::uint64_t seed = 0; seed < 300; ++seed) {
        const Stimulus s = gen_elementary(TaskId::Shading, seed);
        const auto m = oracle::measure_shading(s.canvas);
        REQUIRE(m.has_value());
        CHECK(*m == s.ground_truth.value());
    }
}

TEST_CASE("direction: 0 is up, clockwise") {
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        const Stimulus s = gen_elementary(TaskId::Direction, seed);
        // origin marker: the 3x3 solid block; tip: the ink pixel farthest from it
        const int ox = s.params.get_int("cx"), oy = s.params.get_int("cy");
        int tx = ox, ty = oy;
        double best = 0;
        for (int y = 0; y < 100; ++y)
            for (int x = 0; x < 100; ++x)
                if (s.canvas.inked(x, y) && std::hypot(x - ox, y - oy) > best) {
                    best = std::hypot(x - ox, y - oy);
                    tx = x;
                    ty = y;
                }
        for (int dy = -1; dy <= 1; ++dy)
            for (int dx = -1; dx <= 1; ++dx) CHECK(s.canvas.inked(ox + dx, oy + dy));
        double deg = std::atan2(tx - ox, oy - ty) * 180.0 / std::acos(-1.0);
        if (deg < 0) deg += 360.0;
        double diff = std::abs(deg - s.ground_truth.value());
        diff = std::min(diff, 360.0 - diff);
        CHECK(diff < 2.0);
        CHECK(best == doctest::Approx(30.0).epsilon(0.03));
    }
}

TEST_CASE("angle: rays meet at the labelled angle") {
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        const Stimulus s = gen_elementary(TaskId::Angle, seed);
        const double base = s.params.get("base") * std::acos(-1.0) / 180.0;
        const double a = s.ground_truth.value();
        CHECK(a >= 0);
        CHECK(a <= 90);
        const double other = base + a * std::acos(-1.0) / 180.0;
        const int ox = s.params.get_int("cx"), oy = s.params.get_int("cy");
        for (double th : {base, other}) {
            const int x = static_cast<int>(std::lround(ox + 30 * std::sin(th)));
            const int y = static_cast<int>(std::lround(oy - 30 * std::cos(th)));
            CHECK(s.canvas.inked(x, y));
        }
    }
}

TEST_CASE("volume: cube spans side + side/2 in both directions") {
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        const Stimulus s = gen_elementary(TaskId::Volume, seed);
        const int side = s.params.get_int("side");
        CHECK(s.ground_truth.value() == static_cast<double>(side * side * side));
        const auto box = oracle::ink_box(s.canvas);
        CHECK(box.w() == side + side / 2);
        CHECK(box.h() == side + side / 2);
    }
}

TEST_CASE("curvature") {
    SUBCASE("straight line has zero curvature") {
        CHECK(bezier_max_curvature({{{10, 10}, {20, 20}, {30, 30}, {40, 40}}}) == doctest::Approx(0.0));
    }
    SUBCASE("agrees with a dense finite-difference scan") {
        for (std::uint64_t seed = 0; seed < 40; ++seed) {
            const auto p = sample_params(TaskId::Curvature, seed);
            const std::array<Point, 4> c{{{p.get("x0"), p.get("y0")},
                                          {p.get("x1"), p.get("y1")},
                                          {p.get("x2"), p.get("y2")},
                                          {p.get("x3"), p.get("y3")}}};
            auto pos = [&](double t) {
                const double u = 1 - t;
                return std::pair{u * u * u * c[0].x + 3 * u * u * t * c[1].x + 3 * u * t * t * c[2].x + t * t * t * c[3].x,
                                 u * u * u * c[0].y + 3 * u * u * t * c[1].y + 3 * u * t * t * c[2].y + t * t * t * c[3].y};
            };
            const double h = 1e-4;
            double best = 0;
            for (int i = 1; i < 100000; ++i) {
                const double t = i / 100000.0;
                const auto [xm, ym] = pos(t - h);
                const auto [x0, y0] = pos(t);
                const auto [xp, yp] = pos(t + h);
                const double dx = (xp - xm) / (2 * h), dy = (yp - ym) / (2 * h);
                const double ddx = (xp - 2 * x0 + xm) / (h * h), ddy = (yp - 2 * y0 + ym) / (h * h);
                best = std::max(best, std::abs(dx * ddy - dy * ddx) / std::pow(dx * dx + dy * dy, 1.5));
            }
            const double truth = render_scene(TaskId::Curvature, p).truth.value();
            CHECK(truth <= 0.088);
            CHECK(truth == doctest::Approx(best).epsilon(1e-3));
        }
    }
}

TEST_CASE("sample_segments constraints") {
    std::array<std::set<int>, 5> seen;
    for (std::uint64_t seed = 0; seed < 3000; ++seed) {
        const auto s = sample_segments(seed);
        int sum = 0;
        for (std::size_t i = 0; i < 5; ++i) {
            CHECK(s[i] >= 3);
            CHECK(s[i] <= 39);
            sum += s[i];
            seen[i].insert(s[i]);
        }
        CHECK(sum == 100);
        const int mx = *std::max_element(s.begin(), s.end());
        CHECK(std::count(s.begin(), s.end(), mx) == 1);
    }
    for (const auto& pos : seen) {
        CHECK(*pos.begin() == 3);
        CHECK(*pos.rbegin() == 39);
    }
    CHECK(sample_segments(77) == sample_segments(77));
}

TEST_CASE("position-angle ground truth ordering") {
    const std::array<int, 5> seg{39, 25, 15, 12, 9};
    const auto bar = position_angle_truth(TaskId::Bar, seg);
    REQUIRE(bar.size() == 5);
    CHECK(bar[0] == 1.0);
    CHECK(bar[1] == 25.0 / 39);
    CHECK(bar[2] == 15.0 / 39);
    CHECK(bar[3] == 12.0 / 39);
    CHECK(bar[4] == 9.0 / 39);
    CHECK(bar[1] == doctest::Approx(0.641).epsilon(1e-3));
    CHECK(bar[2] == doctest::Approx(0.385).epsilon(1e-3));
    CHECK(bar[3] == doctest::Approx(0.308).epsilon(1e-3));
    CHECK(bar[4] == doctest::Approx(0.231).epsilon(1e-3));
    // Sectors run clockwise from 12 o'clock, so reading counterclockwise from
    // the first sector visits the last one next.
    const auto pie = position_angle_truth(TaskId::Pie, seg);
    CHECK(pie == std::vector<double>{1.0, 9.0 / 39, 12.0 / 39, 15.0 / 39, 25.0 / 39});
    const std::array<int, 5> mid{12, 15, 39, 25, 9};
    CHECK(position_angle_truth(TaskId::Pie, mid) == std::vector<double>{1.0, 15.0 / 39, 12.0 / 39, 9.0 / 39, 25.0 / 39});
    CHECK(position_angle_truth(TaskId::Bar, mid) == std::vector<double>{1.0, 12.0 / 39, 15.0 / 39, 25.0 / 39, 9.0 / 39});
}

TEST_CASE("E2 stimuli") {
    for (TaskId t : {TaskId::Pie, TaskId::Bar}) {
        for (std::uint64_t seed = 0; seed < 200; ++seed) {
            const Stimulus s = gen_position_angle(t, seed);
            REQUIRE(s.ground_truth.size() == 5);
            CHECK(s.ground_truth.values()[0] == 1.0);
            for (double v : s.ground_truth.values()) {
                CHECK(v > 0.0);
                CHECK(v <= 1.0);
            }
            int sum = 0;
            for (int i = 0; i < 5; ++i) sum += s.params.get_int("v" + std::to_string(i));
            CHECK(sum == 100);
            CHECK(oracle::count_marks(s.canvas) == 1);
        }
    }
}

TEST_CASE("E2 bar heights scale with the segment values") {
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        const Stimulus s = gen_position_angle(TaskId::Bar, seed);
        for (int i = 0; i < 5; ++i) {
            const int x = 9 + i * 18;
            CHECK(oracle::column_count(s.canvas, x) == 2 * s.params.get_int("v" + std::to_string(i)));
        }
    }
}

TEST_CASE("cm_scale") {
    CHECK(cm_scale(1) == 10.0);
    CHECK(std::abs(cm_scale(4) - 17.7828) < 1e-4);
    CHECK(std::abs(cm_scale(10) - 56.2341) < 1e-4);
    CHECK_THROWS(cm_scale(0));
    CHECK_THROWS(cm_scale(11));
    std::set<int> heights;
    for (int i = 1; i < 10; ++i) CHECK(cm_scale(i) < cm_scale(i + 1));
    for (int i = 1; i <= 10; ++i) heights.insert(cm_pixel_height(i));
    CHECK(heights.size() == 10);
    CHECK(10.0 / cm_scale(10) == doctest::Approx(0.1778).epsilon(1e-3));
}

TEST_CASE("E3 stimuli") {
    for (TaskId t : tasks_of(Experiment::E3)) {
        CAPTURE(task_name(t));
        for (std::uint64_t seed = 0; seed < 200; ++seed) {
            const Stimulus s = gen_position_length(t, seed);
            const int a = s.params.get_int("mark_a"), b = s.params.get_int("mark_b");
            const int ia = s.params.get_int("h" + std::to_string(a));
            const int ib = s.params.get_int("h" + std::to_string(b));
            CHECK(ia != ib);
            const double va = cm_scale(ia), vb = cm_scale(ib);
            CHECK(s.ground_truth.value() == std::min(va, vb) / std::max(va, vb));
            CHECK(std::abs(cm_pixel_height(ia) - cm_pixel_height(ib)) >= 1);
            CHECK(oracle::count_marks(s.canvas) == 2);
            if (t == TaskId::Type5) {
                CHECK(a == 0);
                CHECK(b == 1);
            }
        }
    }
}

TEST_CASE("E4 stimuli") {
    for (TaskId t : {TaskId::Framed, TaskId::Unframed}) {
        const bool framed = t == TaskId::Framed;
        for (std::uint64_t seed = 0; seed < 300; ++seed) {
            const Stimulus s = gen_framed_bars(t, seed);
            REQUIRE(s.ground_truth.size() == 2);
            const auto gt = s.ground_truth.values();
            CHECK(gt[0] != gt[1]);
            for (double v : gt) {
                CHECK(v >= 49);
                CHECK(v <= 60);
                CHECK(v == std::round(v));
            }
            const auto m = oracle::measure_bars(s.canvas, framed);
            REQUIRE(m.has_value());
            CHECK((*m)[0] == gt[0]);
            CHECK((*m)[1] == gt[1]);
            if (framed) {
                // the frame interior is exactly 60 rows tall on both sides
                for (int side = 0; side < 2; ++side) {
                    const auto box = oracle::ink_box(s.canvas, side * 50, side * 50 + 49);
                    CHECK(box.h() - 2 == 60);
                }
            }
        }
    }
}

TEST_CASE("E5 dot counts") {
    const std::map<TaskId, int> base{{TaskId::Base10, 10}, {TaskId::Base100, 100}, {TaskId::Base1000, 1000}};
    bool saw_three = false;
    for (const auto& [t, n] : base) {
        for (std::uint64_t seed = 0; seed < 60; ++seed) {
            const Stimulus s = gen_point_cloud(t, seed);
            const double k = s.ground_truth.value();
            CHECK(k >= 1);
            CHECK(k <= 10);
            CHECK(oracle::count_components(s.canvas) == n + static_cast<int>(k));
            CHECK(s.canvas.count_inked() == n + static_cast<int>(k));
            if (t == TaskId::Base10 && k == 3) {
                saw_three = true;
                CHECK(oracle::count_components(s.canvas) == 13);
            }
        }
    }
    CHECK(saw_three);
    CHECK(gen_point_cloud(TaskId::Base100, 5).canvas == gen_point_cloud(TaskId::Base100, 5).canvas);
}

TEST_CASE("fingerprints are canonical") {
    const auto p = sample_params(TaskId::Length, 9);
    CHECK(p.fingerprint() == sample_params(TaskId::Length, 9).fingerprint());
    StimulusParams q;
    q.add("value", 42);
    q.add("x", 0.5);
    CHECK(q.fingerprint() == "value=42;x=0.5");
}

}  // TEST_SUITE
