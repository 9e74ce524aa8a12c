#include "doctest.h"

#include "gpbench/prompts.hpp"
#include "gpbench/random.hpp"
#include "gpbench/response_parse.hpp"
#include "gpbench/stimulus.hpp"

#include <cmath>
#include <map>
#include <set>

using namespace gpbench;

namespace {

// Fixture texts, typed in by hand.
const std::map<std::string, std::string>& fixtures() {
    static const std::map<std::string, std::string> f = [] {
        const std::string pos =
            "Estimate the block's vertical position (range: 0-60, top to bottom). Number only. No explanation.";
        const std::string e2_head =
            "The pie or bar chart you are looking at is created as follows:\n"
            "- First, create a list of five values where each value is between 3 and 39, and all values add up to 100.\n"
            "- Next, divide each value in the list by the largest value, so that the largest value becomes 1.0.\n"
            "- Now, look at the pie chart again.\n"
            "- Identify the largest segment, which is marked with a dot.\n";
        const std::string e2_tail = "\n- Format your answer as [1.0, x.x, x.x, x.x, x.x].";
        auto e3 = [](const std::string& kind) {
            return "In the " + kind +
                   " bar chart, compare the heights of the two marked bars. Estimate the ratio of the height of the "
                   "shorter marked bar to the height of the taller marked bar. Use a scale from 0 to 1, where 1 "
                   "indicates that both marked bars are of equal height. No explanation.";
        };
        const std::string stacked =
            "In the divided stacked bars or the left bar of the mixed divided stacked bar chart, compare the lengths "
            "of the two marked segments in the left and right bars. Estimate the ratio of the shorter marked "
            "segment’s length to the length of the taller marked segment. Use a scale from 0 to 1, where 1 "
            "indicates equal length. No explanation.";
        const std::string e4 =
            "Estimate the lengths of the two bars without framing OR frame. Both lengths should fall between 49 and "
            "60 pixels. No explanation. Format of the answer [xx, xx].";
        auto e5 = [](const std::string& n) {
            return "Please estimate how many dots were added to the initial " + n +
                   " dots. The answer must be within the range of 1 to 10. Number only. No explanation.";
        };
        return std::map<std::string, std::string>{
            {"E1/position_common_scale", pos},
            {"E1/position_nonaligned", pos},
            {"E1/length", "Estimate the line length from top to bottom (range: 0-100). Number only. No explanation."},
            {"E1/direction", "Estimate the line's direction (range: 0-359 degrees). Number only. No explanation."},
            {"E1/angle", "Estimate the angle (range: 0-90 degrees). Number only. No explanation."},
            {"E1/area",
             "Estimate the area of a circle, ensuring your answer falls within the range of 3.14 to 5026.55 square "
             "units. Assume the circle fits within a 100x100 pixel image. Provide only the numeric value, no "
             "explanation."},
            {"E1/volume",
             "Estimate the volume of a cube, with your answer restricted to the range of 1 to 8000 cubic units. "
             "Assume the cube fits within a 100x100 pixel image. Provide only the numeric value, no explanation."},
            {"E1/curvature",
             "Estimate the line curvature (range: 0.000 to 0.088) of a Bezier curve constrained within a 100x100 "
             "pixel space. Provide only the numeric curvature value (up to 3 decimal places), no explanation."},
            {"E1/shading", "Estimate shading density (range: 0-100). Number only. No explanation."},
            {"E2/pie", e2_head +
                           "- Go counterclockwise around the pie starting from the largest segment, estimating the "
                           "ratio of the other four values to the maximum." +
                           e2_tail},
            {"E2/bar", e2_head +
                           "- Move left to right along the bar chart starting from the largest bar, estimating the "
                           "ratio of the other four values to the maximum." +
                           e2_tail},
            {"E3/type1", e3("grouped")},
            {"E3/type2", e3("divided")},
            {"E3/type3", e3("mixed")},
            {"E3/type4", stacked},
            {"E3/type5", stacked},
            {"E4/framed", e4},
            {"E4/unframed", e4},
            {"E5/base10", e5("10")},
            {"E5/base100", e5("100")},
            {"E5/base1000", e5("1000")},
        };
    }();
    return f;
}

std::vector<double> random_truth(const AnswerSchema& s, Rng& rng) {
    std::vector<double> v;
    for (int i = 0; i < s.length; ++i) {
        double x = rng.uniform(s.lo, s.hi);
        if (s.integer) x = std::round(x);
        v.push_back(x);
    }
    if (s.leading_one) v[0] = 1.0;
    return v;
}

}  // namespace

TEST_SUITE("prompt-registry") {

TEST_CASE("task listing") {
    const auto& a = list_tasks();
    CHECK(a.size() == 21);
    CHECK(a == list_tasks());
    std::set<std::string> names;
    for (TaskId t : a) names.insert(task_name(t));
    CHECK(names.size() == 21);
    CHECK(names.contains("E3/type4"));
}

TEST_CASE("texts match the hand-typed fixtures exactly") {
    const auto& f = fixtures();
    CHECK(f.size() == 21);
    for (TaskId t : list_tasks()) {
        const auto name = task_name(t);
        INFO(name);
        REQUIRE(f.contains(name));
        CHECK(get_prompt(t).text == f.at(name));
        CHECK(get_prompt(t).task == t);
    }
}

TEST_CASE("spot checks") {
    CHECK(get_prompt(TaskId::Base100).text.find("added to the initial 100 dots") != std::string::npos);
    CHECK(get_prompt(TaskId::Angle).text ==
          "Estimate the angle (range: 0-90 degrees). Number only. No explanation.");

    const auto& pie = get_prompt(TaskId::Pie).schema;
    CHECK(pie.is_vector());
    CHECK(pie.length == 5);
    CHECK(pie.lo == 0.0);
    CHECK(pie.hi == 1.0);
    CHECK(pie.leading_one);

    const auto& fr = get_prompt(TaskId::Framed).schema;
    CHECK(fr.is_vector());
    CHECK(fr.length == 2);
    CHECK(fr.lo == 49.0);
    CHECK(fr.hi == 60.0);
    CHECK_FALSE(fr.leading_one);
}

TEST_CASE("schema ranges equal ground-truth ranges") {
    for (TaskId t : list_tasks()) {
        INFO(task_name(t));
        const auto& s = get_prompt(t).schema;
        const auto r = truth_range(t);
        CHECK(s.lo == r.lo);
        CHECK(s.hi == r.hi);
        const Stimulus st = generate(t, 17);
        CHECK(static_cast<int>(st.ground_truth.size()) == s.length);
        CHECK(st.ground_truth.is_vector() == s.is_vector());
    }
}

TEST_CASE("hashes are stable and distinguish texts") {
    CHECK(get_prompt(TaskId::Length).hash() == get_prompt(TaskId::Length).hash());
    CHECK(get_prompt(TaskId::Length).hash().size() == 64);
    CHECK(get_prompt(TaskId::Framed).hash() == get_prompt(TaskId::Unframed).hash());
    CHECK(get_prompt(TaskId::Pie).hash() != get_prompt(TaskId::Bar).hash());
}

TEST_CASE("format_answer output parses back") {
    for (TaskId t : list_tasks()) {
        INFO(task_name(t));
        const auto& s = get_prompt(t).schema;
        Rng rng(label_hash(task_name(t)));
        for (int i = 0; i < 1000; ++i) {
            const auto v = random_truth(s, rng);
            RawResponse raw;
            raw.text = format_answer(s, v);
            const auto p = parse(raw, s);
            REQUIRE(p.valid());
            REQUIRE(p.values.size() == v.size());
            for (std::size_t k = 0; k < v.size(); ++k) CHECK(p.values[k] == doctest::Approx(v[k]).epsilon(1e-9));
        }
    }
}

TEST_CASE("format_answer shapes") {
    const std::vector<double> e2{1.0, 0.64, 0.38, 0.31, 0.23};
    CHECK(format_answer(get_prompt(TaskId::Bar).schema, e2) == "[1.0, 0.64, 0.38, 0.31, 0.23]");
    const std::vector<double> e4{52.0, 57.0};
    CHECK(format_answer(get_prompt(TaskId::Framed).schema, e4) == "[52, 57]");
    const std::vector<double> one{42.4};
    CHECK(format_answer(get_prompt(TaskId::Length).schema, one) == "42");
}

TEST_CASE("export") {
    const auto j = export_prompts();
    REQUIRE(j.is_array());
    CHECK(j.size() == 21);
    for (const auto& e : j) {
        const auto t = parse_task(e.at("task").get<std::string>());
        REQUIRE(t);
        CHECK(e.at("text") == get_prompt(*t).text);
        CHECK(e.at("sha256") == get_prompt(*t).hash());
    }
    CHECK(j[9].at("answer_schema").at("kind") == "vector");
    CHECK(j[9].at("answer_schema").at("leading_one") == true);
}

}  // TEST_SUITE
