#pragma once

#include "gpbench/dataset.hpp"
#include "gpbench/gateway.hpp"
#include "gpbench/metrics.hpp"
#include "gpbench/response_parse.hpp"
#include "gpbench/stats.hpp"

#include "json.hpp"

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace gpbench {

// Bad config, missing inputs, stages out of order. Exit code 1.
class UserError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct RunConfig {
    std::vector<ModelSpec> models;
    std::vector<TaskId> tasks;
    int runs_per_stimulus = 3;
    std::uint64_t master_seed = 0;
    std::filesystem::path output_dir = "out";
    int concurrency = 4;
    int bootstrap_resamples = 10000;
    Aggregate aggregate = Aggregate::Mean;
    ScoreOptions score;
    SplitSizes split_sizes;

    void validate() const;
    // Everything that affects results; output_dir and concurrency are left out.
    nlohmann::json canonical_json() const;
    std::string hash() const;  // 16 hex digits
    std::filesystem::path run_dir() const { return output_dir / hash(); }
};

RunConfig config_from_json(const nlohmann::json& j);
RunConfig load_config(const std::filesystem::path& file);

struct GenSummary {
    int generated = 0;
    int skipped = 0;
};

struct EvalSummary {
    std::size_t responses = 0;
    std::size_t cache_hits = 0;
    std::vector<QueryFailure> failures;
};

struct ExperimentAnalysis {
    Experiment experiment;
    std::vector<std::string> models;
    std::optional<AnovaResult> anova;
    std::optional<TukeyResult> tukey;
    std::string note;  // why ANOVA/Tukey were skipped
};

struct AnalysisSummary {
    std::vector<MetricSummary> summaries;  // task-major, model-minor
    std::vector<ExperimentAnalysis> experiments;
};

// Stages. Each records completion in run.json and refuses to run before its
// predecessor has completed.
GenSummary cmd_gen(const RunConfig& cfg, std::ostream& log);
EvalSummary cmd_eval(const RunConfig& cfg, std::ostream& log, const GatewayEnv& env = {});
void cmd_balance(const RunConfig& cfg, std::ostream& log);
AnalysisSummary cmd_analyze(const RunConfig& cfg, std::ostream& log);
void cmd_report(const RunConfig& cfg, std::ostream& log);

// Table of invalid-response counts by (model, reason), read from trials.jsonl.
std::string invalid_report(const RunConfig& cfg);

std::vector<MetricSummary> read_summary_json(const std::filesystem::path& file);

}  // namespace gpbench
