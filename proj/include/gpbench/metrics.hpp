#pragma once

#include "gpbench/response_parse.hpp"
#include "gpbench/task.hpp"

#include <cstdint>
#include <span>
#include <string>

namespace gpbench {

// Mean of per-item log2(|err| + 0.125) values.
double mlae(std::span<const double> per_item_laes);

// Mean of the middle half of the sorted values (drops floor(n/4) from each end).
double midmean(std::span<const double> values);

double mae(std::span<const double> preds, std::span<const double> truths);
double mse(std::span<const double> preds, std::span<const double> truths);

double sample_sd(std::span<const double> values);

struct ConfidenceInterval {
    double low = 0.0;
    double high = 0.0;
};

enum class Aggregate { Mean, Midmean };

// Percentile bootstrap: `resamples` resamples of size n with replacement, the
// statistic of each, then the (1-level)/2 and (1+level)/2 empirical quantiles
// (linear interpolation between order statistics).
ConfidenceInterval bootstrap_ci(std::span<const double> values, int resamples = 10000, double level = 0.95,
                                std::uint64_t seed = 0, Aggregate statistic = Aggregate::Mean);

struct MetricSummary {
    std::string model_id;
    TaskId task = TaskId::Length;
    std::size_t n = 0;  // scored components
    double mlae = 0.0;
    double mlae_sd = 0.0;
    double mae = 0.0;
    double mse = 0.0;
    double ci_low = 0.0;
    double ci_high = 0.0;
    int bootstrap_resamples = 0;
    std::uint64_t seed = 0;
};

MetricSummary summarize(std::span<const TrialRecord> records, std::uint64_t seed, int resamples = 10000,
                        Aggregate aggregate = Aggregate::Mean);

}  // namespace gpbench
