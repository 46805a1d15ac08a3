#include "doctest.h"

#include "cle/rng.hpp"
#include "cle/stats.hpp"

#include <cmath>
#include <vector>

namespace {

std::vector<double> uniform_sample(cle::Rng& rng, std::size_t n, double shift = 0.0) {
    std::vector<double> v(n);
    for (auto& x : v) x = rng.uniform() + shift;
    return v;
}

} // namespace

TEST_SUITE("stats") {

TEST_CASE("kolmogorov survival matches tabled critical values") {
    // Q(1.36) ~ 0.049, the classic 5% critical point.
    CHECK(cle::ks_q(1.36) == doctest::Approx(0.0494).epsilon(0.02));
    CHECK(cle::ks_q(1.63) == doctest::Approx(0.0102).epsilon(0.05));
    CHECK(cle::ks_q(0.1) == doctest::Approx(1.0));
    CHECK(cle::ks_q(5.0) < 1e-20);
}

TEST_CASE("incomplete gamma against closed forms") {
    // P(1, x) = 1 - exp(-x).
    for (double x : {0.1, 0.5, 1.0, 3.0, 10.0}) {
        CHECK(cle::gamma_p(1.0, x) == doctest::Approx(1.0 - std::exp(-x)).epsilon(1e-12));
        CHECK(cle::gamma_q(1.0, x) == doctest::Approx(std::exp(-x)).epsilon(1e-12));
    }
    // chi-square with 2 dof has survival exp(-x/2).
    for (double x : {0.3, 1.0, 4.0, 12.0})
        CHECK(cle::chisq_sf(x, 2.0) == doctest::Approx(std::exp(-x / 2.0)).epsilon(1e-12));
    // P(a, x) + Q(a, x) = 1 across the series/continued-fraction split.
    for (double a : {0.3, 1.7, 8.0})
        for (double x : {0.2, 1.0, 5.0, 30.0})
            CHECK(cle::gamma_p(a, x) + cle::gamma_q(a, x) == doctest::Approx(1.0).epsilon(1e-12));
    // Known value: chi-square sf at its own dof is near the median.
    CHECK(cle::chisq_sf(4.35, 5.0) == doctest::Approx(0.5).epsilon(0.01));
}

TEST_CASE("normal cdf") {
    CHECK(cle::normal_cdf(0.0) == doctest::Approx(0.5));
    CHECK(cle::normal_cdf(1.959964) == doctest::Approx(0.975).epsilon(1e-5));
    CHECK(cle::normal_cdf(-1.959964) == doctest::Approx(0.025).epsilon(1e-3));
}

TEST_CASE("two-sample KS accepts equal laws and rejects a shift") {
    cle::Rng rng(1234, 7);
    auto a = uniform_sample(rng, 4000);
    auto b = uniform_sample(rng, 4000);
    auto same = cle::ks_two_sample(a, b);
    CHECK(same.p_value > 0.005);
    auto c = uniform_sample(rng, 4000, 0.08);
    auto shifted = cle::ks_two_sample(a, c);
    CHECK(shifted.p_value < 1e-6);
}

TEST_CASE("one-sample KS against the true CDF") {
    cle::Rng rng(99, 3);
    auto u = uniform_sample(rng, 5000);
    auto res = cle::ks_one_sample(u, [](double x) {
        if (x < 0.0) return 0.0;
        if (x > 1.0) return 1.0;
        return x;
    });
    CHECK(res.p_value > 0.005);
    // Exponential sample vs uniform CDF must fail hard.
    std::vector<double> e(3000);
    for (auto& x : e) x = -std::log(rng.uniform()) * 0.4;
    auto bad = cle::ks_one_sample(e, [](double x) {
        if (x < 0.0) return 0.0;
        if (x > 1.0) return 1.0;
        return x;
    });
    CHECK(bad.p_value < 1e-8);
}

TEST_CASE("chi-square GOF: exact agreement and bin merging") {
    std::vector<double> obs = {10, 20, 30, 40};
    auto perfect = cle::chisq_gof(obs, obs);
    CHECK(perfect.statistic == doctest::Approx(0.0));
    CHECK(perfect.p_value == doctest::Approx(1.0));
    CHECK(perfect.dof == 3);

    // Tail bins below the threshold collapse into their neighbour.
    std::vector<double> o2 = {50, 30, 3, 1, 1};
    std::vector<double> e2 = {48, 32, 2, 2, 1};
    auto merged = cle::chisq_gof(o2, e2);
    CHECK(merged.bins_used == 3);
    CHECK(merged.dof == 2);
    CHECK(merged.p_value > 0.1);
}

TEST_CASE("geometric fit accepts geometric data and rejects poisson-like data") {
    cle::Rng rng(42, 11);
    std::vector<long long> geo;
    const double p = 0.35;
    for (int i = 0; i < 6000; ++i) {
        long long k = 1;
        while (rng.uniform() > p) ++k;
        geo.push_back(k);
    }
    auto ok = cle::geometric_fit_test(geo);
    CHECK(ok.p_value > 0.005);

    std::vector<long long> pois;
    for (int i = 0; i < 6000; ++i) pois.push_back(1 + rng.poisson(2.0));
    auto bad = cle::geometric_fit_test(pois);
    CHECK(bad.p_value < 1e-8);
}

TEST_CASE("tail exponent recovers a pareto index") {
    cle::Rng rng(5, 2);
    std::vector<double> x(200000);
    const double alpha = 0.5;
    for (auto& v : x) v = std::pow(rng.uniform(), -1.0 / alpha);
    auto fit = cle::tail_exponent(x, 2.0, 200.0, 14);
    CHECK(fit.points >= 10);
    CHECK(fit.exponent == doctest::Approx(-alpha).epsilon(0.06));
    CHECK_FALSE(fit.curvature_flag);

    // Exponential tails bend hard on a log-log plot.
    std::vector<double> e(200000);
    for (auto& v : e) v = -std::log(rng.uniform());
    auto bent = cle::tail_exponent(e, 1.0, 8.0, 14);
    CHECK(bent.curvature_flag);
}

TEST_CASE("holm adjustment worked example") {
    std::vector<double> p = {0.01, 0.04, 0.03, 0.005};
    auto adj = cle::holm_adjust(p);
    CHECK(adj[3] == doctest::Approx(0.02));
    CHECK(adj[0] == doctest::Approx(0.03));
    CHECK(adj[2] == doctest::Approx(0.06));
    CHECK(adj[1] == doctest::Approx(0.06)); // monotone step-down
}

TEST_CASE("binomial three-sigma band") {
    CHECK(cle::binomial_within_3sigma(500, 1000, 0.5));
    CHECK(cle::binomial_within_3sigma(455, 1000, 0.5));
    CHECK_FALSE(cle::binomial_within_3sigma(420, 1000, 0.5));
    CHECK(cle::binomial_within_3sigma(0, 50, 0.0));
}

TEST_CASE("logistic regression recovers the slope") {
    cle::Rng rng(77, 1);
    std::vector<double> x;
    std::vector<int> y;
    const double b0 = 0.4, b1 = 1.2;
    for (int i = 0; i < 20000; ++i) {
        double xi = rng.uniform(-3.0, 3.0);
        double mu = 1.0 / (1.0 + std::exp(-(b0 + b1 * xi)));
        x.push_back(xi);
        y.push_back(rng.uniform() < mu ? 1 : 0);
    }
    auto fit = cle::logistic_slope(x, y);
    CHECK(fit.converged);
    CHECK(fit.slope == doctest::Approx(b1).epsilon(0.08));
    CHECK(std::fabs(fit.slope - b1) < 4.0 * fit.stderr_);
}

TEST_CASE("linear fit on an exact line and a noisy one") {
    std::vector<double> x = {0, 1, 2, 3, 4};
    std::vector<double> y = {1, 3, 5, 7, 9};
    auto fit = cle::linear_fit(x, y);
    CHECK(fit.slope == doctest::Approx(2.0));
    CHECK(fit.intercept == doctest::Approx(1.0));
    CHECK(fit.slope_stderr == doctest::Approx(0.0).epsilon(1e-10));

    cle::Rng rng(8, 8);
    std::vector<double> xn, yn;
    for (int i = 0; i < 2000; ++i) {
        double xi = rng.uniform(0.0, 10.0);
        xn.push_back(xi);
        yn.push_back(0.5 - 0.75 * xi + 0.3 * rng.normal());
    }
    auto nf = cle::linear_fit(xn, yn);
    CHECK(nf.slope == doctest::Approx(-0.75).epsilon(0.02));
    CHECK(std::fabs(nf.slope + 0.75) < 4.0 * nf.slope_stderr);
}

TEST_CASE("mean and standard error helpers") {
    std::vector<double> v = {1.0, 2.0, 3.0, 4.0};
    CHECK(cle::mean_of(v) == doctest::Approx(2.5));
    // sample sd = sqrt(5/3), stderr = sd/2
    CHECK(cle::stderr_of(v) == doctest::Approx(std::sqrt(5.0 / 3.0) / 2.0));
}

} // TEST_SUITE
