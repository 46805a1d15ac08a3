#include "doctest.h"

#include "cle/bessel.hpp"
#include "cle/drivers.hpp"
#include "cle/pv.hpp"
#include "cle/stats.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace {

cle::BesselPath handmade_path() {
    cle::BesselPath p;
    p.delta = 0.5;
    p.dt = 0.01;
    // Excursion A over [0,5] (duration 0.05), excursion B over [6,8] (0.02).
    p.z = {0.0, 4.0, 4.0, 4.0, 4.0, 0.0, 0.0, 0.01, 0.0};
    return p;
}

} // namespace

TEST_SUITE("drivers") {

TEST_CASE("macro flags, signs, and jump bookkeeping on a handmade path") {
    auto p = handmade_path();
    const double kappa = cle::kappa_from_delta(p.delta);
    const double r = 0.2; // r^2 = 0.04: A macro, B micro
    const double beta = 0.8;
    // Marks: A gets + (0.3 < 0.9), B gets - (0.7 >= 0.5).
    std::vector<double> marks = {0.3, 0.7};
    auto d = cle::build_beta_driver(p, marks, kappa, r, beta);

    REQUIRE(d.excursions.size() == 2);
    CHECK(d.excursions[0].macro);
    CHECK_FALSE(d.excursions[1].macro);
    CHECK(d.excursions[0].sign == +1);
    CHECK(d.excursions[1].sign == -1);
    CHECK(d.usable_until == 8);

    const double rk = std::sqrt(kappa);
    const double C = cle::c_constant_analytic(p.delta);
    const double jump = -2.0 * rk * beta * C * r;
    // Across excursion A (x vanishes at both ends): 2 sqrt(k) i_A + jump.
    double iA = d.excursions[0].i_value;
    CHECK(iA == doctest::Approx(3.5 * p.dt));
    CHECK(d.w[5] - d.w[0] == doctest::Approx(2.0 * rk * iA + jump));
    // Interior point of A: sqrt(k) y + 2 sqrt(k) (first boundary step).
    CHECK(d.w[1] == doctest::Approx(rk * 2.0 + 2.0 * rk * (2.0 * p.dt / 2.0)));
    CHECK(d.x[1] == doctest::Approx(2.0));
    // Micro excursion B carries sign -1 and no jump.
    double iB = d.excursions[1].i_value;
    CHECK(iB == doctest::Approx(4.0 * p.dt / 0.1));
    CHECK(d.w[8] - d.w[6] == doctest::Approx(-2.0 * rk * iB));
    CHECK(d.w[6] == doctest::Approx(d.w[5]));
}

TEST_CASE("mu family at kappa 4: fair signs plus count-proportional jumps") {
    cle::BesselPath p;
    p.delta = 1.0;
    p.dt = 0.01;
    p.z = {0.0, 4.0, 4.0, 4.0, 4.0, 0.0};
    std::vector<double> marks = {0.9}; // sign -1
    const double r = 0.2, mu = -1.7; // duration 0.05 >= r^2 = 0.04: macro
    auto d = cle::build_mu_driver(p, marks, r, mu);
    REQUIRE(d.excursions.size() == 1);
    CHECK(d.excursions[0].macro);
    CHECK(d.excursions[0].sign == -1);
    double i = d.excursions[0].i_value;
    CHECK(d.w[5] - d.w[0] == doctest::Approx(-4.0 * i + 4.0 * mu * r));
}

TEST_CASE("parameter guards") {
    auto p = handmade_path();
    std::vector<double> marks = {0.5, 0.5};
    CHECK_THROWS(cle::build_beta_driver(p, marks, 4.0, 0.3, 0.2));          // wrong dimension
    CHECK_THROWS(cle::build_mu_driver(p, marks, 0.3, 0.2));                 // needs kappa 4
    CHECK_THROWS(cle::build_beta_driver(p, marks, cle::kappa_from_delta(0.5), 0.01, 0.0)); // r too small
    CHECK_THROWS(cle::build_beta_driver(p, {0.5}, cle::kappa_from_delta(0.5), 0.3, 0.0));  // marks short
    cle::BesselPath p4 = p;
    p4.delta = 1.0;
    CHECK_THROWS(cle::build_beta_driver(p4, marks, 4.0, 0.3, 0.2)); // beta biased at kappa 4
    CHECK_NOTHROW(cle::build_beta_driver(p4, marks, 4.0, 0.3, 0.0));
}

TEST_CASE("shared marks couple signs monotonically across beta") {
    cle::Rng rng(2100, 0);
    auto path = cle::simulate_squared_bessel(0.5, 1e-4, 0.0, 5.0, rng);
    const double kappa = cle::kappa_from_delta(0.5), r = 0.05;
    cle::Rng mrng(2100, 99);
    auto marks = cle::excursion_marks(cle::decompose_excursions(path).size(), mrng);
    auto lo = cle::build_beta_driver(path, marks, kappa, r, -0.4);
    auto hi = cle::build_beta_driver(path, marks, kappa, r, 0.6);
    REQUIRE(lo.excursions.size() == hi.excursions.size());
    int macro_seen = 0;
    for (std::size_t j = 0; j < lo.excursions.size(); ++j) {
        CHECK(lo.excursions[j].macro == hi.excursions[j].macro);
        if (lo.excursions[j].macro) {
            ++macro_seen;
            CHECK(lo.excursions[j].sign <= hi.excursions[j].sign);
        } else {
            CHECK(lo.excursions[j].sign == hi.excursions[j].sign);
        }
    }
    CHECK(macro_seen > 3);

    // Extreme biases pin every macro sign.
    auto all_plus = cle::build_beta_driver(path, marks, kappa, r, 1.0);
    auto all_minus = cle::build_beta_driver(path, marks, kappa, r, -1.0);
    for (std::size_t j = 0; j < all_plus.excursions.size(); ++j) {
        if (all_plus.excursions[j].macro) {
            CHECK(all_plus.excursions[j].sign == +1);
            CHECK(all_minus.excursions[j].sign == -1);
        }
    }
}

TEST_CASE("fair micro signs and macro fraction under the duration law") {
    cle::Rng rng(2200, 0);
    auto path = cle::simulate_squared_bessel(1.0, 1e-4, 0.0, 20.0, rng);
    cle::Rng mrng(2200, 99);
    auto marks = cle::excursion_marks(cle::decompose_excursions(path).size(), mrng);
    auto d = cle::build_mu_driver(path, marks, 0.1, 0.0);
    long long plus = 0, micro_total = 0;
    for (const auto& e : d.excursions) {
        if (!e.macro) {
            ++micro_total;
            if (e.sign > 0) ++plus;
        }
    }
    // Grid resolution caps the count: only excursions lasting >= 2dt are
    // visible, about (2/pi) sqrt(T/2dt) of them, roughly 200 here.
    REQUIRE(micro_total > 150);
    CHECK(cle::binomial_within_3sigma(plus, micro_total, 0.5));
}

TEST_CASE("signed component is a standard random walk in law at dimension 1") {
    // With fair signs the signed path at a fixed time is centered Gaussian
    // with variance t. Evaluate at a fixed index; dropping paths whose zero
    // set has not yet covered it would thin the tails (long straddling
    // excursions carry large values), so instead draw the straddling open
    // excursion's sign from its own mark, which is what a rebuild after
    // extension would assign.
    std::vector<double> endpoints;
    const std::size_t idx = 2000;
    for (int k = 0; k < 300; ++k) {
        cle::Rng rng(2300, static_cast<std::uint64_t>(k));
        auto path = cle::simulate_squared_bessel(1.0, 1e-4, 0.0, 2.0, rng);
        cle::Rng mrng(2301, static_cast<std::uint64_t>(k));
        auto all = cle::decompose_excursions(path, false);
        auto marks = cle::excursion_marks(all.size(), mrng);
        auto d = cle::build_mu_driver(path, marks, 0.05, 0.0);
        double x;
        if (idx <= d.usable_until) {
            x = d.x[idx];
        } else if (path.z[idx] == 0.0) {
            x = 0.0;
        } else {
            double sign = marks[d.excursions.size()] < 0.5 ? 1.0 : -1.0;
            x = sign * path.y(idx);
        }
        endpoints.push_back(x / std::sqrt(path.t(idx)));
    }
    REQUIRE(endpoints.size() == 300);
    auto res = cle::ks_one_sample(endpoints, [](double v) { return cle::normal_cdf(v); });
    CHECK(res.p_value > 0.005);
}

TEST_CASE("extending the path and regenerating marks preserves the driver prefix") {
    cle::Rng rng(2500, 7);
    auto path = cle::simulate_squared_bessel(0.5, 1e-4, 0.0, 1.0, rng);
    const double kappa = cle::kappa_from_delta(0.5);
    cle::Rng m1(2501, 0);
    auto marks1 = cle::excursion_marks(cle::decompose_excursions(path).size(), m1);
    auto d1 = cle::build_beta_driver(path, marks1, kappa, 0.05, 0.3);

    cle::extend_squared_bessel(path, 1.0, rng);
    cle::Rng m2(2501, 0);
    auto marks2 = cle::excursion_marks(cle::decompose_excursions(path).size(), m2);
    auto d2 = cle::build_beta_driver(path, marks2, kappa, 0.05, 0.3);

    REQUIRE(d2.usable_until >= d1.usable_until);
    std::size_t mismatches = 0;
    for (std::size_t i = 0; i <= d1.usable_until; ++i) {
        if (d1.w[i] != d2.w[i] || d1.x[i] != d2.x[i]) ++mismatches;
    }
    CHECK(mismatches == 0);
}

TEST_CASE("quadratic variation of the signed component matches its clock") {
    double qv = 0.0, t_used = 0.0;
    for (int k = 0; k < 20; ++k) {
        cle::Rng rng(2400, static_cast<std::uint64_t>(k));
        auto path = cle::simulate_squared_bessel(1.0, 1e-4, 0.0, 1.0, rng);
        cle::Rng mrng(2401, static_cast<std::uint64_t>(k));
        auto marks = cle::excursion_marks(cle::decompose_excursions(path).size(), mrng);
        auto d = cle::build_mu_driver(path, marks, 0.05, 0.0);
        for (std::size_t i = 1; i <= d.usable_until; ++i) {
            double dx = d.x[i] - d.x[i - 1];
            qv += dx * dx;
        }
        t_used += path.t(d.usable_until);
    }
    CHECK(qv / t_used == doctest::Approx(1.0).epsilon(0.1));
}

TEST_CASE("single-loop driver matches the assembled driver over one excursion") {
    std::vector<double> z = {0.0, 0.09, 0.25, 0.16, 0.0};
    const double dt = 0.05, kappa = 3.5;
    auto w = cle::bubble_driver(z, dt, kappa, -1, 2.0);
    REQUIRE(w.size() == 5);
    CHECK(w[0] == doctest::Approx(2.0));
    const double i = cle::excursion_i_integral(z, dt, 0, 4);
    CHECK(w[4] == doctest::Approx(2.0 - 2.0 * std::sqrt(kappa) * i));
    // Interior: w0 + s (sqrt(k) y + 2 sqrt(k) partial).
    double partial = 2.0 * dt / 0.3 + 0.5 * dt * (1.0 / 0.3 + 1.0 / 0.5);
    CHECK(w[2] == doctest::Approx(2.0 - std::sqrt(kappa) * (0.5 + 2.0 * partial)));
}

} // TEST_SUITE
