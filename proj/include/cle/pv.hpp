#pragma once
// Principal-value integral of 1/X along excursion-decomposed paths, and the
// compensation constant for drift-corrected drivers: the conditional mean of
// the excursion integral given a long duration, in units of sqrt(duration).

#include "cle/bessel.hpp"
#include "cle/rng.hpp"

#include <cstddef>
#include <vector>

namespace cle {

// Integral of ds / sqrt(z(s)) over one excursion [begin, end] with exact
// zeros at both ends: trapezoid inside, square-root endpoint model for the
// two boundary steps.
double excursion_i_integral(const std::vector<double>& z, double dt, std::size_t begin,
                            std::size_t end);
double excursion_i_integral(const BesselPath& path, const ExcursionRef& e);

// Same integral restricted to the central part of the excursion, clipping a
// fixed fraction of the duration at each end. Unlike the full integral this
// avoids the boundary grid steps, whose values sit below the resolution at
// which the zero set is meaningful, so it compares cleanly across samplers
// with different step counts.
double excursion_core_integral(const std::vector<double>& z, double dt, std::size_t begin,
                               std::size_t end, double clip_fraction = 0.05);

// Running signed integral sum_j sign_j * int ds / y over the grid: constant
// outside excursions, accumulating inside each one. signs[j] pairs with
// excursions[j].
std::vector<double> signed_pv_profile(const BesselPath& path,
                                      const std::vector<ExcursionRef>& excursions,
                                      const std::vector<int>& signs);

struct CEstimate {
    double value = 0.0;
    double stderr_ = 0.0;
    std::size_t n = 0;
};

// Excursion integrals i(e)/sqrt(s0) of all excursions with duration >= s0
// harvested from one path of length t_total started at 0.
std::vector<double> harvest_scaled_integrals(double delta, double dt, double t_total, double s0,
                                             Rng& rng);

// Mean of the harvested scaled integrals over n_paths paths. The duration law
// above s0 is heavy tailed, so this estimator converges slowly; it serves as
// a cross-check of the bridge estimator below.
CEstimate estimate_c_harvest(double delta, double dt, double t_total, double s0, int n_paths,
                             Rng& rng);

// Mean excursion integral at duration exactly 1, from bridge samples.
CEstimate estimate_unit_integral_bridge(double delta, std::size_t n_samples, std::size_t n_steps,
                                        Rng& rng);

// Compensation constant from the bridge route: the unit-duration mean times
// (2-delta)/(1-delta), which converts a fixed-duration mean into the mean
// conditioned on duration >= s0 in units of sqrt(s0). Finite for delta < 1.
CEstimate estimate_c_bridge(double delta, std::size_t n_samples, std::size_t n_steps, Rng& rng);

// Closed forms used as frozen cross-checks of the two estimators above.
double unit_excursion_integral_analytic(double delta);          // finite on (0, 2)
double c_constant_analytic(double delta);                       // +inf at delta >= 1

} // namespace cle
