#pragma once

#include "gpbench/task.hpp"

#include "json.hpp"

#include <span>
#include <string>
#include <vector>

namespace gpbench {

struct AnswerSchema {
    enum class Kind { Scalar, Vector };

    Kind kind = Kind::Scalar;
    int length = 1;          // arity; 1 for scalars
    double lo = 0.0;         // inclusive range, per component
    double hi = 0.0;
    bool integer = false;    // answers are whole numbers
    bool leading_one = false;  // vector answers open with the fixed 1.0 marker

    bool is_vector() const { return kind == Kind::Vector; }
    bool in_range(double v) const { return v >= lo && v <= hi; }
};

struct PromptTemplate {
    TaskId task;
    std::string text;
    AnswerSchema schema;

    std::string hash() const;
};

const PromptTemplate& get_prompt(TaskId task);

// Renders values the way an ideal respondent would: bare number for scalars,
// "[a, b, ...]" for vectors, integers without a fractional part.
std::string format_answer(const AnswerSchema& schema, std::span<const double> values);

nlohmann::json export_prompts();

}  // namespace gpbench
