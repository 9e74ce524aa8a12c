#include "gpbench/response_parse.hpp"

#include "gpbench/numfmt.hpp"
#include "gpbench/random.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <regex>

namespace gpbench {

void to_json(nlohmann::json& j, const RawResponse& r) {
    j = {{"text", r.text},           {"latency_ms", r.latency_ms}, {"model_id", r.model_id},
         {"stimulus_id", r.stimulus_id}, {"task", r.task},         {"run_index", r.run_index},
         {"from_cache", r.from_cache}};
}

void from_json(const nlohmann::json& j, RawResponse& r) {
    r.text = j.at("text").get<std::string>();
    r.latency_ms = j.value("latency_ms", 0.0);
    r.model_id = j.at("model_id").get<std::string>();
    r.stimulus_id = j.at("stimulus_id").get<std::string>();
    r.task = j.value("task", std::string{});
    r.run_index = j.at("run_index").get<int>();
    r.from_cache = j.value("from_cache", false);
}

namespace {

constexpr std::array<std::string_view, 5> kReasonNames{"no_numeric", "wrong_arity", "out_of_range",
                                                       "malformed_vector", "empty"};

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

std::optional<std::vector<double>> strict_values(std::string_view t, const AnswerSchema& schema) {
    if (!schema.is_vector()) {
        if (auto v = parse_number(t)) return std::vector<double>{*v};
        return std::nullopt;
    }
    if (t.size() < 2 || t.front() != '[' || t.back() != ']') return std::nullopt;
    std::vector<double> out;
    std::string_view inner = t.substr(1, t.size() - 2);
    while (true) {
        const auto comma = inner.find(',');
        const auto v = parse_number(trim(inner.substr(0, comma)));
        if (!v) return std::nullopt;
        out.push_back(*v);
        if (comma == std::string_view::npos) break;
        inner.remove_prefix(comma + 1);
    }
    return out;
}

std::vector<double> numeric_literals(const std::string& text) {
    static const std::regex kLiteral(R"([-+]?(?:\d+(?:\.\d*)?|\.\d+)(?:[eE][-+]?\d+)?)");
    std::vector<double> out;
    for (auto it = std::sregex_iterator(text.begin(), text.end(), kLiteral); it != std::sregex_iterator(); ++it)
        if (auto v = parse_number(it->str())) out.push_back(*v);
    return out;
}

}  // namespace

std::string_view reason_name(InvalidReason r) { return kReasonNames[static_cast<std::size_t>(r)]; }

std::optional<InvalidReason> parse_reason(std::string_view name) {
    for (std::size_t i = 0; i < kReasonNames.size(); ++i)
        if (kReasonNames[i] == name) return static_cast<InvalidReason>(i);
    return std::nullopt;
}

ParsedResponse parse(const RawResponse& raw, const AnswerSchema& schema) {
    ParsedResponse out{raw, {}, std::nullopt};
    const std::string_view t = trim(raw.text);
    if (t.empty()) {
        out.invalid = InvalidReason::Empty;
        return out;
    }
    const auto strict = strict_values(t, schema);
    std::vector<double> values = strict ? *strict : numeric_literals(std::string(t));
    if (values.empty()) {
        out.invalid = InvalidReason::NoNumeric;
        return out;
    }
    const auto arity = static_cast<std::size_t>(schema.length);
    if (values.size() + 1 == arity && schema.leading_one) values.insert(values.begin(), 1.0);
    if (values.size() != arity) {
        const bool bracketed = t.find('[') != std::string_view::npos;
        out.invalid = schema.is_vector() && bracketed ? InvalidReason::MalformedVector : InvalidReason::WrongArity;
        return out;
    }
    if (!std::all_of(values.begin(), values.end(), [&](double v) { return schema.in_range(v); })) {
        out.invalid = InvalidReason::OutOfRange;
        return out;
    }
    out.values = std::move(values);
    return out;
}

double log_abs_error(double predicted, double truth) { return std::log2(std::abs(predicted - truth) + kLaeOffset); }

TrialRecord score(const ParsedResponse& parsed, const GroundTruth& truth, TaskId task, ScoreOptions options) {
    if (!parsed.valid()) throw std::invalid_argument("score: response is invalid");
    if (parsed.values.size() != truth.size()) throw std::invalid_argument("score: arity mismatch with ground truth");
    TrialRecord r;
    r.stimulus_id = parsed.source.stimulus_id;
    r.model_id = parsed.source.model_id;
    r.task = task;
    r.run_index = parsed.source.run_index;
    r.parsed = parsed;
    const bool skip_marker = experiment_of(task) == Experiment::E2 && !options.score_marker;
    for (std::size_t i = skip_marker ? 1 : 0; i < truth.size(); ++i) {
        const double p = parsed.values[i];
        const double t = truth.values()[i];
        double pred = p;
        if (task == TaskId::Direction && options.circular_direction) {
            // Shift the prediction to the representative nearest the truth.
            const double d = std::fmod(std::fmod(p - t, 360.0) + 540.0, 360.0) - 180.0;
            pred = t + d;
        }
        r.predictions.push_back(pred);
        r.truths.push_back(t);
        r.per_item_lae.push_back(log_abs_error(pred, t));
    }
    return r;
}

TrialRecord invalid_record(const ParsedResponse& parsed, TaskId task) {
    TrialRecord r;
    r.stimulus_id = parsed.source.stimulus_id;
    r.model_id = parsed.source.model_id;
    r.task = task;
    r.run_index = parsed.source.run_index;
    r.parsed = parsed;
    return r;
}

RecordsByModel balance(const RecordsByModel& records, std::uint64_t seed) {
    if (records.empty()) throw std::invalid_argument("balance: no models");
    std::size_t target = SIZE_MAX;
    for (const auto& [model, list] : records) {
        if (std::any_of(list.begin(), list.end(), [](const TrialRecord& r) { return !r.valid(); }))
            throw std::invalid_argument("balance: model '" + model + "' has invalid records in its input");
        if (list.empty()) throw EmptyBalanceError(model);
        target = std::min(target, list.size());
    }
    RecordsByModel out;
    for (const auto& [model, list] : records) {
        std::vector<std::size_t> idx(list.size());
        std::iota(idx.begin(), idx.end(), 0);
        Rng rng(derive_seed(seed, label_hash(model)));
        for (std::size_t i = 0; i < target; ++i) {
            const auto j = static_cast<std::size_t>(rng.integer(static_cast<std::int64_t>(i),
                                                                static_cast<std::int64_t>(idx.size() - 1)));
            std::swap(idx[i], idx[j]);
        }
        idx.resize(target);
        std::sort(idx.begin(), idx.end());
        auto& kept = out[model];
        kept.reserve(target);
        for (std::size_t i : idx) kept.push_back(list[i]);
    }
    return out;
}

nlohmann::json to_json(const TrialRecord& r) {
    nlohmann::json j;
    j["stimulus_id"] = r.stimulus_id;
    j["model_id"] = r.model_id;
    j["task"] = task_name(r.task);
    j["run_index"] = r.run_index;
    j["raw"] = r.parsed.source;
    j["valid"] = r.valid();
    if (r.valid()) {
        j["values"] = r.parsed.values;
        j["predictions"] = r.predictions;
        j["truths"] = r.truths;
        j["per_item_lae"] = r.per_item_lae;
    } else {
        j["reason"] = std::string(reason_name(*r.parsed.invalid));
    }
    return j;
}

TrialRecord trial_from_json(const nlohmann::json& j) {
    TrialRecord r;
    r.stimulus_id = j.at("stimulus_id").get<std::string>();
    r.model_id = j.at("model_id").get<std::string>();
    const auto task = parse_task(j.at("task").get<std::string>());
    if (!task) throw std::runtime_error("trial record: unknown task");
    r.task = *task;
    r.run_index = j.at("run_index").get<int>();
    r.parsed.source = j.at("raw").get<RawResponse>();
    if (j.at("valid").get<bool>()) {
        r.parsed.values = j.at("values").get<std::vector<double>>();
        r.predictions = j.at("predictions").get<std::vector<double>>();
        r.truths = j.at("truths").get<std::vector<double>>();
        r.per_item_lae = j.at("per_item_lae").get<std::vector<double>>();
    } else {
        const auto reason = parse_reason(j.at("reason").get<std::string>());
        if (!reason) throw std::runtime_error("trial record: unknown invalid reason");
        r.parsed.invalid = *reason;
    }
    return r;
}

}  // namespace gpbench
