#include "doctest.h"

#include "cle/bessel.hpp"
#include "cle/pv.hpp"
#include "cle/stats.hpp"

#include <cmath>
#include <vector>

TEST_SUITE("pv") {

TEST_CASE("excursion integral on a parabolic profile equals pi") {
    // z(s) = s (T - s) gives int ds / sqrt(z) = pi for every T.
    for (std::size_t n : {500u, 2000u}) {
        const double T = 2.5;
        const double dt = T / static_cast<double>(n);
        std::vector<double> z(n + 1, 0.0);
        for (std::size_t k = 1; k < n; ++k) {
            double t = dt * static_cast<double>(k);
            z[k] = t * (T - t);
        }
        double err = std::fabs(cle::excursion_i_integral(z, dt, 0, n) - M_PI);
        CHECK(err < (n == 500 ? 0.02 : 0.005));
    }
}

TEST_CASE("unit-duration excursion integral: exact mean at dimension 1") {
    // The mean of int ds/e(s) over a duration-1 excursion is sqrt(2 pi).
    cle::Rng rng(1001, 0);
    auto est = cle::estimate_unit_integral_bridge(1.0, 4000, 2000, rng);
    CHECK(est.n == 4000);
    CHECK(est.value == doctest::Approx(std::sqrt(2.0 * M_PI)).epsilon(0.03));
    CHECK(std::fabs(est.value - std::sqrt(2.0 * M_PI)) < 4.0 * est.stderr_ + 0.05);
}

TEST_CASE("unit-duration integral matches the closed form at dimension 1/2") {
    double analytic = cle::unit_excursion_integral_analytic(0.5);
    CHECK(analytic == doctest::Approx(2.19083).epsilon(1e-4));
    cle::Rng rng(1002, 0);
    auto est = cle::estimate_unit_integral_bridge(0.5, 4000, 2000, rng);
    CHECK(est.value == doctest::Approx(analytic).epsilon(0.03));
}

TEST_CASE("compensation constant: bridge route, harvest route, closed form") {
    const double delta = 0.5;
    double analytic = cle::c_constant_analytic(delta);
    CHECK(analytic == doctest::Approx(6.57249).epsilon(1e-4));

    cle::Rng rng_b(1003, 0);
    auto bridge = cle::estimate_c_bridge(delta, 4000, 2000, rng_b);
    CHECK(bridge.value == doctest::Approx(analytic).epsilon(0.04));

    // The harvest mean is heavy tailed (duration has no mean above the
    // cutoff), so its tolerance is wide.
    cle::Rng rng_h(1004, 0);
    auto harvest = cle::estimate_c_harvest(delta, 2e-5, 100.0, 2e-3, 2, rng_h);
    CHECK(harvest.n > 250);
    CHECK(harvest.value == doctest::Approx(analytic).epsilon(0.2));

    CHECK(std::isinf(cle::c_constant_analytic(1.0)));
    CHECK_THROWS(cle::estimate_c_bridge(1.0, 10, 10, rng_b));
}

TEST_CASE("scaled core integrals of harvested excursions match the bridge law") {
    // i(e)/sqrt(tau) has the same law for every duration. The comparison uses
    // the clipped core integral: the two samplers only share a law above the
    // grid scale, and the boundary steps of harvested excursions live below
    // it (their values follow the one-step law from an exact zero, which is
    // much more singular than a long excursion's entry profile).
    const double delta = 0.5, dt = 2e-5, s0 = 2e-3;
    cle::Rng rng(1005, 0);
    std::vector<double> harvested;
    for (int p = 0; p < 2 && harvested.size() < 400; ++p) {
        auto path = cle::simulate_squared_bessel(delta, dt, 0.0, 100.0, rng);
        for (const auto& e : cle::decompose_excursions(path))
            if (e.duration >= s0)
                harvested.push_back(cle::excursion_core_integral(path.z, dt, e.begin, e.end) /
                                    std::sqrt(e.duration));
    }
    REQUIRE(harvested.size() >= 300);

    cle::Rng rng_b(1006, 0);
    std::vector<double> bridged;
    for (int k = 0; k < 800; ++k) {
        auto z = cle::sample_excursion_bridge(delta, 1.0, 2000, rng_b);
        bridged.push_back(cle::excursion_core_integral(z, 1.0 / 2000.0, 0, 2000));
    }
    CHECK(cle::ks_two_sample(harvested, bridged).p_value > 0.005);
}

TEST_CASE("signed running profile bookkeeping") {
    cle::BesselPath p;
    p.delta = 1.0;
    p.dt = 0.1;
    p.z = {0.0, 4.0, 0.0, 0.0, 9.0, 0.0};
    auto exc = cle::decompose_excursions(p);
    REQUIRE(exc.size() == 2);
    auto profile = cle::signed_pv_profile(p, exc, {-1, +1});
    // First excursion contributes -4 dt / 2, second +4 dt / 3.
    CHECK(profile[0] == doctest::Approx(0.0));
    CHECK(profile[1] == doctest::Approx(-0.1));
    CHECK(profile[2] == doctest::Approx(-0.2));
    CHECK(profile[3] == doctest::Approx(-0.2));
    CHECK(profile[4] == doctest::Approx(-0.2 + 2.0 * 0.1 / 3.0));
    CHECK(profile[5] == doctest::Approx(-0.2 + 4.0 * 0.1 / 3.0));
    // Totals agree with the per-excursion integral.
    CHECK(profile[2] == doctest::Approx(-cle::excursion_i_integral(p, exc[0])));
}

} // TEST_SUITE
