#pragma once

#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace gpbench {

class DegenerateDataError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class QuadratureError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct AnovaResult {
    double f_stat = 0.0;
    int df_between = 0;
    int df_within = 0;
    double p_value = 1.0;
    double ss_between = 0.0;
    double ss_within = 0.0;
};

using Groups = std::vector<std::vector<double>>;

// Classical one-way decomposition; p from the F upper tail.
AnovaResult anova_oneway(const Groups& groups);

// P(F > f) for F ~ F(d1, d2), via the regularized incomplete beta function.
double f_upper_tail(double f, double d1, double d2);

// Adaptive Gauss-Kronrod (7/15) on [a, b]. Throws QuadratureError when the
// error estimate stays above abs_tol after max_depth bisections.
double integrate(const std::function<double(double)>& f, double a, double b, double abs_tol, int max_depth = 30);

// CDF of the studentized range of k standard normals scaled by an independent
// chi/sqrt(df) variate. Nested quadrature; absolute accuracy well under 1e-4.
double studentized_range_cdf(double q, int k, int df);

// Inverse of the above in q, by bisection.
double studentized_range_quantile(double p, int k, int df);

struct TukeyPair {
    std::size_t a = 0;
    std::size_t b = 0;
    std::string group_a;
    std::string group_b;
    double mean_diff = 0.0;  // mean(a) - mean(b)
    double q_stat = 0.0;
    double p_value = 1.0;
    bool significant = false;
};

struct TukeyResult {
    double alpha = 0.01;
    double ms_within = 0.0;
    int df_within = 0;
    std::vector<TukeyPair> pairs;  // (0,1), (0,2), ..., (k-2,k-1)
};

// Tukey HSD with the Tukey-Kramer standard error for unequal group sizes.
TukeyResult tukey_hsd(const Groups& groups, const std::vector<std::string>& labels = {}, double alpha = 0.01);

}  // namespace gpbench
