#pragma once

#include "gpbench/prompts.hpp"
#include "gpbench/response.hpp"
#include "gpbench/stimulus.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace gpbench {

enum class InvalidReason { NoNumeric, WrongArity, OutOfRange, MalformedVector, Empty };
std::string_view reason_name(InvalidReason r);
std::optional<InvalidReason> parse_reason(std::string_view name);

struct ParsedResponse {
    RawResponse source;
    std::vector<double> values;            // filled iff valid
    std::optional<InvalidReason> invalid;  // set iff invalid

    bool valid() const { return !invalid.has_value(); }
};

// Strict pass (the whole trimmed text is a number or a bracketed list), then a
// lenient pass over every numeric literal in the text. Out-of-range answers
// are rejected, never clamped.
ParsedResponse parse(const RawResponse& raw, const AnswerSchema& schema);

struct ScoreOptions {
    bool score_marker = false;        // include E2's fixed leading 1.0 in the error terms
    bool circular_direction = false;  // E1 direction error wraps at 360 degrees
};

struct TrialRecord {
    std::string stimulus_id;
    std::string model_id;
    TaskId task = TaskId::Length;
    int run_index = 1;
    ParsedResponse parsed;
    std::vector<double> predictions;   // scored components only
    std::vector<double> truths;
    std::vector<double> per_item_lae;  // log2(|pred - true| + 0.125) per scored component

    bool valid() const { return parsed.valid(); }
};

inline constexpr double kLaeOffset = 0.125;
double log_abs_error(double predicted, double truth);

// Requires a valid response whose arity matches the ground truth.
TrialRecord score(const ParsedResponse& parsed, const GroundTruth& truth, TaskId task, ScoreOptions options = {});

// Bookkeeping record for an invalid response; carries no error terms.
TrialRecord invalid_record(const ParsedResponse& parsed, TaskId task);

class EmptyBalanceError : public std::runtime_error {
public:
    explicit EmptyBalanceError(const std::string& model)
        : std::runtime_error("model '" + model + "' has no valid responses; balanced size would be 0"), model_(model) {}
    const std::string& model() const { return model_; }

private:
    std::string model_;
};

using RecordsByModel = std::map<std::string, std::vector<TrialRecord>>;

// Down-samples every model to the smallest valid count by seeded sampling
// without replacement; kept records stay in their input order.
RecordsByModel balance(const RecordsByModel& records, std::uint64_t seed);

nlohmann::json to_json(const TrialRecord& r);
TrialRecord trial_from_json(const nlohmann::json& j);

}  // namespace gpbench
