#pragma once

#include "gpbench/metrics.hpp"
#include "gpbench/task.hpp"

#include <string>
#include <vector>

namespace gpbench {

// Small-multiple dot plot for one experiment: a panel per task that has
// summaries, one row per model (dot at MLAE, bar over the CI) and shaded rows
// for human baselines (bar over +-1 SD). Output depends only on the inputs.
std::string render_experiment_svg(Experiment e, const std::vector<MetricSummary>& summaries);

// Markdown table of every summary row plus the matching human baselines.
std::string render_markdown(const std::vector<MetricSummary>& summaries);

}  // namespace gpbench
