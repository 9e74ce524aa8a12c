#include "gpbench/stats.hpp"

#include <boost/math/special_functions/beta.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

namespace gpbench {

namespace {

struct Moments {
    std::vector<double> means;
    std::vector<std::size_t> sizes;
    double ss_between = 0.0;
    double ss_within = 0.0;
    std::size_t total = 0;
};

Moments decompose(const Groups& groups) {
    if (groups.size() < 2) throw DegenerateDataError("anova: need at least two groups");
    Moments m;
    double grand = 0.0;
    for (const auto& g : groups) {
        if (g.size() < 2) throw DegenerateDataError("anova: every group needs at least two values");
        const double mu = std::accumulate(g.begin(), g.end(), 0.0) / static_cast<double>(g.size());
        m.means.push_back(mu);
        m.sizes.push_back(g.size());
        m.total += g.size();
        grand += mu * static_cast<double>(g.size());
    }
    grand /= static_cast<double>(m.total);
    for (std::size_t i = 0; i < groups.size(); ++i) {
        m.ss_between += static_cast<double>(m.sizes[i]) * (m.means[i] - grand) * (m.means[i] - grand);
        for (double v : groups[i]) m.ss_within += (v - m.means[i]) * (v - m.means[i]);
    }
    if (m.ss_between + m.ss_within == 0.0) throw DegenerateDataError("anova: all values identical");
    return m;
}

// 15-point Kronrod nodes (non-negative half) and weights, with the embedded 7-point Gauss weights.
constexpr std::array<double, 8> kXgk{0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
                                     0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
                                     0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
                                     0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kWgk{0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
                                     0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
                                     0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
                                     0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kWg{0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                                    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
    double value;
    double error;
};

Segment gk15(const std::function<double(double)>& f, double a, double b) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    const double fc = f(c);
    double kronrod = fc * kWgk[7];
    double gauss = fc * kWg[3];
    for (std::size_t j = 0; j < 7; ++j) {
        const double dx = h * kXgk[j];
        const double s = f(c - dx) + f(c + dx);
        kronrod += kWgk[j] * s;
        if (j % 2 == 1) gauss += kWg[j / 2] * s;
    }
    return {kronrod * h, std::abs((kronrod - gauss) * h)};
}

double adaptive(const std::function<double(double)>& f, double a, double b, double tol, int depth, int max_depth) {
    const Segment whole = gk15(f, a, b);
    if (whole.error <= tol) return whole.value;
    if (depth >= max_depth)
        throw QuadratureError("quadrature did not converge on [" + std::to_string(a) + ", " + std::to_string(b) +
                              "], error estimate " + std::to_string(whole.error));
    const double m = 0.5 * (a + b);
    return adaptive(f, a, m, tol / 2, depth + 1, max_depth) + adaptive(f, m, b, tol / 2, depth + 1, max_depth);
}

double normal_pdf(double z) { return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi); }
double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

constexpr double kTruncation = 8.0;  // standard deviations
constexpr double kInnerTol = 1e-10;
constexpr double kOuterTol = 1e-8;

// P(range of k iid standard normals <= w).
double normal_range_cdf(double w, int k) {
    if (w <= 0.0) return 0.0;
    auto f = [&](double z) {
        const double band = normal_cdf(z) - normal_cdf(z - w);
        return normal_pdf(z) * std::pow(std::max(band, 0.0), k - 1);
    };
    const double p = k * integrate(f, -kTruncation, kTruncation, kInnerTol);
    return std::clamp(p, 0.0, 1.0);
}

}  // namespace

double integrate(const std::function<double(double)>& f, double a, double b, double abs_tol, int max_depth) {
    if (a == b) return 0.0;
    return adaptive(f, a, b, abs_tol, 0, max_depth);
}

double f_upper_tail(double f, double d1, double d2) {
    if (std::isinf(f)) return 0.0;
    if (f <= 0.0) return 1.0;
    // P(F > f) = I_{d2 / (d2 + d1 f)}(d2/2, d1/2)
    return boost::math::ibeta(d2 / 2.0, d1 / 2.0, d2 / (d2 + d1 * f));
}

AnovaResult anova_oneway(const Groups& groups) {
    const Moments m = decompose(groups);
    AnovaResult r;
    r.df_between = static_cast<int>(groups.size()) - 1;
    r.df_within = static_cast<int>(m.total - groups.size());
    r.ss_between = m.ss_between;
    r.ss_within = m.ss_within;
    const double msb = m.ss_between / r.df_between;
    const double msw = m.ss_within / r.df_within;
    r.f_stat = msw == 0.0 ? std::numeric_limits<double>::infinity() : msb / msw;
    r.p_value = f_upper_tail(r.f_stat, r.df_between, r.df_within);
    return r;
}

double studentized_range_cdf(double q, int k, int df) {
    if (k < 2) throw std::invalid_argument("studentized_range_cdf: k must be >= 2");
    if (df < 1) throw std::invalid_argument("studentized_range_cdf: df must be >= 1");
    if (!(q > 0.0)) return 0.0;
    if (std::isinf(q)) return 1.0;
    constexpr int kLargeDf = 100000;  // scale variate is 1 to within quadrature accuracy
    if (df >= kLargeDf) return normal_range_cdf(q, k);

    // s = chi_df / sqrt(df); integrate its density against the normal-range CDF.
    const double nu = df;
    const double log_norm = std::log(2.0) + 0.5 * nu * std::log(0.5 * nu) - std::lgamma(0.5 * nu);
    auto f = [&](double s) {
        if (s <= 0.0) return 0.0;
        const double log_density = log_norm + (nu - 1.0) * std::log(s) - 0.5 * nu * s * s;
        return std::exp(log_density) * normal_range_cdf(q * s, k);
    };
    // Split around the scale density's bulk (mode near 1, sd about 1/sqrt(2 df)).
    const double sd = 1.0 / std::sqrt(2.0 * nu);
    const double lo = std::max(0.0, 1.0 - kTruncation * sd);
    const double hi = 1.0 + kTruncation * sd;
    const double tail_end = hi + kTruncation * 2.0;
    double p = integrate(f, lo, hi, kOuterTol) + integrate(f, hi, tail_end, kOuterTol);
    if (lo > 0.0) p += integrate(f, 0.0, lo, kOuterTol);
    return std::clamp(p, 0.0, 1.0);
}

double studentized_range_quantile(double p, int k, int df) {
    if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("studentized_range_quantile: p must be in (0, 1)");
    double lo = 0.0;
    double hi = 10.0;
    while (studentized_range_cdf(hi, k, df) < p) {
        hi *= 2.0;
        if (hi > 1e6) throw QuadratureError("studentized_range_quantile: no bracket");
    }
    for (int it = 0; it < 60 && hi - lo > 1e-9; ++it) {
        const double mid = 0.5 * (lo + hi);
        (studentized_range_cdf(mid, k, df) < p ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

TukeyResult tukey_hsd(const Groups& groups, const std::vector<std::string>& labels, double alpha) {
    const Moments m = decompose(groups);
    if (!labels.empty() && labels.size() != groups.size())
        throw std::invalid_argument("tukey_hsd: one label per group required");
    TukeyResult r;
    r.alpha = alpha;
    r.df_within = static_cast<int>(m.total - groups.size());
    r.ms_within = m.ss_within / r.df_within;
    const int k = static_cast<int>(groups.size());
    for (std::size_t a = 0; a < groups.size(); ++a) {
        for (std::size_t b = a + 1; b < groups.size(); ++b) {
            TukeyPair pair;
            pair.a = a;
            pair.b = b;
            pair.group_a = labels.empty() ? std::to_string(a) : labels[a];
            pair.group_b = labels.empty() ? std::to_string(b) : labels[b];
            pair.mean_diff = m.means[a] - m.means[b];
            const double se = std::sqrt(r.ms_within / 2.0 *
                                        (1.0 / static_cast<double>(m.sizes[a]) + 1.0 / static_cast<double>(m.sizes[b])));
            if (se == 0.0) {
                pair.q_stat = pair.mean_diff == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
            } else {
                pair.q_stat = std::abs(pair.mean_diff) / se;
            }
            pair.p_value = 1.0 - studentized_range_cdf(pair.q_stat, k, r.df_within);
            pair.significant = pair.p_value < alpha;
            r.pairs.push_back(std::move(pair));
        }
    }
    return r;
}

}  // namespace gpbench
