#pragma once
// Statistical test helpers used by module tests, the acceptance suite, and the
// CLI report command: Kolmogorov-Smirnov, chi-square goodness of fit, tail
// exponent regression, Holm correction, and a couple of small regressions.

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

namespace cle {

struct KsResult {
    double statistic = 0.0; // sup |F1 - F2|
    double p_value = 1.0;   // asymptotic, with the small-sample correction
    std::size_t n1 = 0, n2 = 0;
};

// Two-sample KS test. Inputs need not be sorted.
KsResult ks_two_sample(std::vector<double> a, std::vector<double> b);

// One-sample KS test against a continuous CDF.
KsResult ks_one_sample(std::vector<double> a, const std::function<double(double)>& cdf);

// Survival function of the Kolmogorov distribution, Q(lambda).
double ks_q(double lambda);

// Regularized incomplete gamma functions (series/continued-fraction split).
double gamma_p(double a, double x); // P(a,x), lower
double gamma_q(double a, double x); // Q(a,x), upper

// Chi-square survival: P(X > x) with k degrees of freedom.
double chisq_sf(double x, double k);

// Standard normal CDF.
double normal_cdf(double x);

struct ChiSquareResult {
    double statistic = 0.0;
    double p_value = 1.0;
    int dof = 0;
    int bins_used = 0;
};

// Goodness of fit of observed counts against expected counts (same length).
// Bins are merged greedily from the right until every expected count is at
// least `min_expected`. `extra_constraints` subtracts fitted parameters from
// the degrees of freedom (1 is already subtracted for the total).
ChiSquareResult chisq_gof(const std::vector<double>& observed,
                          const std::vector<double>& expected,
                          int extra_constraints = 0,
                          double min_expected = 5.0);

// Fit of positive-integer samples (support 1,2,...) against a geometric law
// with p estimated as 1/mean; dof accounts for the estimated parameter.
ChiSquareResult geometric_fit_test(const std::vector<long long>& samples);

struct TailFit {
    double exponent = 0.0;  // slope of log survival vs log x
    double stderr_ = 0.0;   // standard error of the slope
    double curvature = 0.0; // quadratic coefficient of the log-log fit
    double curvature_z = 0.0;
    bool curvature_flag = false; // true when the quadratic term is significant
    int points = 0;
};

// Least-squares slope of log empirical survival vs log x over a geometric
// grid of thresholds spanning [x_min, x_max].
TailFit tail_exponent(const std::vector<double>& samples, double x_min, double x_max,
                      int grid_points = 12);

// Holm step-down adjustment; returns adjusted p-values in the input order.
std::vector<double> holm_adjust(const std::vector<double>& p_values);

// |observed/n - p| <= 3 sqrt(p(1-p)/n), with the degenerate p in {0,1} handled.
bool binomial_within_3sigma(long long successes, long long n, double p);

struct LogisticFit {
    double slope = 0.0;
    double stderr_ = 0.0;
    bool converged = false;
};

// One-covariate logistic regression (intercept + slope) via Newton iteration.
LogisticFit logistic_slope(const std::vector<double>& x, const std::vector<int>& y);

struct LineFit {
    double slope = 0.0, intercept = 0.0, slope_stderr = 0.0;
};

LineFit linear_fit(const std::vector<double>& x, const std::vector<double>& y);

double mean_of(const std::vector<double>& v);
double stderr_of(const std::vector<double>& v);

} // namespace cle
