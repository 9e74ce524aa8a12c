#include "gpbench/prompts.hpp"

#include "gpbench/hashing.hpp"
#include "gpbench/numfmt.hpp"
#include "gpbench/stimulus.hpp"

#include <array>
#include <cmath>
#include <stdexcept>

namespace gpbench {

namespace {

constexpr const char* kPosition =
    "Estimate the block's vertical position (range: 0-60, top to bottom). Number only. No explanation.";

std::string position_angle_prompt(const char* reading_order) {
    std::string s = "The pie or bar chart you are looking at is created as follows:\n";
    s += "- First, create a list of five values where each value is between 3 and 39, and all values add up to 100.\n";
    s += "- Next, divide each value in the list by the largest value, so that the largest value becomes 1.0.\n";
    s += "- Now, look at the pie chart again.\n";
    s += "- Identify the largest segment, which is marked with a dot.\n";
    s += "- ";
    s += reading_order;
    s += "\n- Format your answer as [1.0, x.x, x.x, x.x, x.x].";
    return s;
}

std::string grouped_prompt(const char* chart) {
    return std::string("In the ") + chart +
           " bar chart, compare the heights of the two marked bars. Estimate the ratio of the height of the shorter "
           "marked bar to the height of the taller marked bar. Use a scale from 0 to 1, where 1 indicates that both "
           "marked bars are of equal height. No explanation.";
}

constexpr const char* kStackedPrompt =
    "In the divided stacked bars or the left bar of the mixed divided stacked bar chart, compare the lengths of the "
    "two marked segments in the left and right bars. Estimate the ratio of the shorter marked segment’s length "
    "to the length of the taller marked segment. Use a scale from 0 to 1, where 1 indicates equal length. No "
    "explanation.";

constexpr const char* kFramedPrompt =
    "Estimate the lengths of the two bars without framing OR frame. Both lengths should fall between 49 and 60 "
    "pixels. No explanation. Format of the answer [xx, xx].";

std::string point_cloud_prompt(int base) {
    return "Please estimate how many dots were added to the initial " + std::to_string(base) +
           " dots. The answer must be within the range of 1 to 10. Number only. No explanation.";
}

AnswerSchema scalar(TaskId t, bool integer) {
    const auto r = truth_range(t);
    return {AnswerSchema::Kind::Scalar, 1, r.lo, r.hi, integer, false};
}

AnswerSchema vector(TaskId t, int length, bool integer, bool leading_one) {
    const auto r = truth_range(t);
    return {AnswerSchema::Kind::Vector, length, r.lo, r.hi, integer, leading_one};
}

PromptTemplate make(TaskId t) {
    switch (t) {
        case TaskId::PositionCommonScale:
        case TaskId::PositionNonAligned: return {t, kPosition, scalar(t, true)};
        case TaskId::Length:
            return {t, "Estimate the line length from top to bottom (range: 0-100). Number only. No explanation.",
                    scalar(t, true)};
        case TaskId::Direction:
            return {t, "Estimate the line's direction (range: 0-359 degrees). Number only. No explanation.",
                    scalar(t, true)};
        case TaskId::Angle:
            return {t, "Estimate the angle (range: 0-90 degrees). Number only. No explanation.", scalar(t, true)};
        case TaskId::Area:
            return {t,
                    "Estimate the area of a circle, ensuring your answer falls within the range of 3.14 to 5026.55 "
                    "square units. Assume the circle fits within a 100x100 pixel image. Provide only the numeric "
                    "value, no explanation.",
                    scalar(t, false)};
        case TaskId::Volume:
            return {t,
                    "Estimate the volume of a cube, with your answer restricted to the range of 1 to 8000 cubic "
                    "units. Assume the cube fits within a 100x100 pixel image. Provide only the numeric value, no "
                    "explanation.",
                    scalar(t, true)};
        case TaskId::Curvature:
            return {t,
                    "Estimate the line curvature (range: 0.000 to 0.088) of a Bezier curve constrained within a "
                    "100x100 pixel space. Provide only the numeric curvature value (up to 3 decimal places), no "
                    "explanation.",
                    scalar(t, false)};
        case TaskId::Shading:
            return {t, "Estimate shading density (range: 0-100). Number only. No explanation.", scalar(t, true)};
        case TaskId::Pie:
            return {t,
                    position_angle_prompt("Go counterclockwise around the pie starting from the largest segment, "
                                          "estimating the ratio of the other four values to the maximum."),
                    vector(t, 5, false, true)};
        case TaskId::Bar:
            return {t,
                    position_angle_prompt("Move left to right along the bar chart starting from the largest bar, "
                                          "estimating the ratio of the other four values to the maximum."),
                    vector(t, 5, false, true)};
        case TaskId::Type1: return {t, grouped_prompt("grouped"), scalar(t, false)};
        case TaskId::Type2: return {t, grouped_prompt("divided"), scalar(t, false)};
        case TaskId::Type3: return {t, grouped_prompt("mixed"), scalar(t, false)};
        case TaskId::Type4:
        case TaskId::Type5: return {t, kStackedPrompt, scalar(t, false)};
        case TaskId::Framed:
        case TaskId::Unframed: return {t, kFramedPrompt, vector(t, 2, true, false)};
        case TaskId::Base10: return {t, point_cloud_prompt(10), scalar(t, true)};
        case TaskId::Base100: return {t, point_cloud_prompt(100), scalar(t, true)};
        case TaskId::Base1000: return {t, point_cloud_prompt(1000), scalar(t, true)};
    }
    throw std::invalid_argument("get_prompt: unknown task");
}

}  // namespace

std::string PromptTemplate::hash() const { return sha256_hex(text); }

const PromptTemplate& get_prompt(TaskId task) {
    static const std::array<PromptTemplate, kTaskCount> registry = [] {
        std::array<PromptTemplate, kTaskCount> r{};
        for (TaskId t : list_tasks()) r[static_cast<std::size_t>(t)] = make(t);
        return r;
    }();
    const auto i = static_cast<std::size_t>(task);
    if (i >= registry.size()) throw std::invalid_argument("get_prompt: unknown task");
    return registry[i];
}

std::string format_answer(const AnswerSchema& schema, std::span<const double> values) {
    auto one = [&](double v) { return format_number(schema.integer ? std::round(v) : v); };
    if (!schema.is_vector()) return one(values.front());
    std::string out = "[";
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) out += ", ";
        out += (i == 0 && schema.leading_one && values[i] == 1.0) ? "1.0" : one(values[i]);
    }
    out += "]";
    return out;
}

nlohmann::json export_prompts() {
    nlohmann::json out = nlohmann::json::array();
    for (TaskId t : list_tasks()) {
        const auto& p = get_prompt(t);
        out.push_back({{"task", task_name(t)},
                       {"text", p.text},
                       {"sha256", p.hash()},
                       {"answer_schema",
                        {{"kind", p.schema.is_vector() ? "vector" : "scalar"},
                         {"length", p.schema.length},
                         {"range", {p.schema.lo, p.schema.hi}},
                         {"integer", p.schema.integer},
                         {"leading_one", p.schema.leading_one}}}});
    }
    return out;
}

}  // namespace gpbench
