#include "gpbench/metrics.hpp"

#include "gpbench/random.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace gpbench {

namespace {

void require_nonempty(std::span<const double> v, const char* what) {
    if (v.empty()) throw std::invalid_argument(std::string(what) + ": empty input");
}

void require_paired(std::span<const double> a, std::span<const double> b, const char* what) {
    require_nonempty(a, what);
    if (a.size() != b.size()) throw std::invalid_argument(std::string(what) + ": length mismatch");
}

// Accumulated as offsets from the first element, so constant input returns
// that constant exactly.
double mean(std::span<const double> v) {
    const double pivot = v.front();
    double acc = 0.0;
    for (double x : v) acc += x - pivot;
    return pivot + acc / static_cast<double>(v.size());
}

double quantile_sorted(const std::vector<double>& sorted, double p) {
    const double h = (static_cast<double>(sorted.size()) - 1.0) * p;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

double aggregate(std::span<const double> v, Aggregate a) { return a == Aggregate::Mean ? mean(v) : midmean(v); }

}  // namespace

double mlae(std::span<const double> per_item_laes) {
    require_nonempty(per_item_laes, "mlae");
    return mean(per_item_laes);
}

double midmean(std::span<const double> values) {
    require_nonempty(values, "midmean");
    std::vector<double> s(values.begin(), values.end());
    std::sort(s.begin(), s.end());
    const std::size_t cut = s.size() / 4;
    return mean(std::span(s).subspan(cut, s.size() - 2 * cut));
}

double mae(std::span<const double> preds, std::span<const double> truths) {
    require_paired(preds, truths, "mae");
    double acc = 0.0;
    for (std::size_t i = 0; i < preds.size(); ++i) acc += std::abs(preds[i] - truths[i]);
    return acc / static_cast<double>(preds.size());
}

double mse(std::span<const double> preds, std::span<const double> truths) {
    require_paired(preds, truths, "mse");
    double acc = 0.0;
    for (std::size_t i = 0; i < preds.size(); ++i) acc += (preds[i] - truths[i]) * (preds[i] - truths[i]);
    return acc / static_cast<double>(preds.size());
}

double sample_sd(std::span<const double> values) {
    require_nonempty(values, "sample_sd");
    if (values.size() < 2) return 0.0;
    const double m = mean(values);
    double ss = 0.0;
    for (double v : values) ss += (v - m) * (v - m);
    return std::sqrt(ss / static_cast<double>(values.size() - 1));
}

ConfidenceInterval bootstrap_ci(std::span<const double> values, int resamples, double level, std::uint64_t seed,
                                Aggregate statistic) {
    require_nonempty(values, "bootstrap_ci");
    if (resamples < 1) throw std::invalid_argument("bootstrap_ci: resamples must be positive");
    if (!(level > 0.0 && level < 1.0)) throw std::invalid_argument("bootstrap_ci: level must be in (0, 1)");
    Rng rng(seed);
    const auto n = static_cast<std::int64_t>(values.size());
    std::vector<double> draw(values.size());
    std::vector<double> stats(static_cast<std::size_t>(resamples));
    for (auto& s : stats) {
        for (auto& d : draw) d = values[static_cast<std::size_t>(rng.integer(0, n - 1))];
        s = aggregate(draw, statistic);
    }
    std::sort(stats.begin(), stats.end());
    const double tail = (1.0 - level) / 2.0;
    return {quantile_sorted(stats, tail), quantile_sorted(stats, 1.0 - tail)};
}

MetricSummary summarize(std::span<const TrialRecord> records, std::uint64_t seed, int resamples, Aggregate agg) {
    if (records.empty()) throw std::invalid_argument("summarize: no records");
    std::vector<double> lae;
    std::vector<double> preds;
    std::vector<double> truths;
    for (const auto& r : records) {
        if (!r.valid()) throw std::invalid_argument("summarize: invalid record " + r.stimulus_id);
        lae.insert(lae.end(), r.per_item_lae.begin(), r.per_item_lae.end());
        preds.insert(preds.end(), r.predictions.begin(), r.predictions.end());
        truths.insert(truths.end(), r.truths.begin(), r.truths.end());
    }
    MetricSummary s;
    s.model_id = records.front().model_id;
    s.task = records.front().task;
    s.n = lae.size();
    s.mlae = aggregate(lae, agg);
    s.mlae_sd = sample_sd(lae);
    s.mae = mae(preds, truths);
    s.mse = mse(preds, truths);
    const auto ci = bootstrap_ci(lae, resamples, 0.95, seed, agg);
    s.ci_low = ci.low;
    s.ci_high = ci.high;
    s.bootstrap_resamples = resamples;
    s.seed = seed;
    return s;
}

}  // namespace gpbench
