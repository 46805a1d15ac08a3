#pragma once
// Squared Bessel paths with exact one-step transitions, sub-step zero
// detection through bridge hitting probabilities, excursion decomposition,
// and exact samplers for single excursions (duration-conditioned bridges and
// height-conditioned two-leg chains).

#include "cle/rng.hpp"

#include <cstddef>
#include <vector>

namespace cle {

// kappa in (8/3, 4] <-> process dimension delta = 3 - 8/kappa in (0, 1].
double delta_from_kappa(double kappa);
double kappa_from_delta(double delta);

struct BesselPath {
    double delta = 1.0;
    double dt = 1e-4;
    std::vector<double> z; // squared process on the grid; zeros are exact 0.0
    std::size_t steps() const { return z.empty() ? 0 : z.size() - 1; }
    double y(std::size_t i) const; // sqrt(z[i])
    double t(std::size_t i) const { return dt * static_cast<double>(i); }
};

// Grid index range [begin, end] with z[begin] = z[end] = 0 and z > 0 inside.
struct ExcursionRef {
    std::size_t begin = 0;
    std::size_t end = 0;
    double duration = 0.0;
};

// Probability that a squared Bessel bridge of dimension delta from z0 to z1
// over a time interval h touches 0.
double bridge_zero_probability(double delta, double z0, double z1, double h);

// Exact-transition path of the squared Bessel process started from z0 over
// [0, t_max]. After each step between two positive values, the bridge hit
// probability decides whether the step straddled a zero; a detected zero is
// snapped to the smaller grid endpoint so the zero set is exact on the grid.
BesselPath simulate_squared_bessel(double delta, double dt, double z0, double t_max, Rng& rng);

// Continue an existing path for additional_t more time under the same rules.
void extend_squared_bessel(BesselPath& path, double additional_t, Rng& rng);

// Maximal intervals where the path is positive. complete=false also keeps
// boundary segments that miss a zero on one side.
std::vector<ExcursionRef> decompose_excursions(const BesselPath& path, bool complete = true);

// Excursion of the dimension-delta process conditioned on its duration: a
// squared Bessel bridge of dimension 4-delta from 0 to 0 over [0, duration],
// returned as squared values on a grid of n steps (z[0] = z[n] = 0).
std::vector<double> sample_excursion_bridge(double delta, double duration, std::size_t n,
                                            Rng& rng);

// Excursion duration under the excursion measure conditioned on tau >= s0:
// Pareto with tail exponent 1 - delta/2.
double sample_excursion_duration(double delta, double s0, Rng& rng);

// Excursion conditioned to reach sqrt(z) >= level, as a two-leg chain: an
// upcrossing leg of dimension 4-delta run from 0 until it first reaches the
// level, glued to an unconditioned dimension-delta leg run to absorption.
// Stops early (with z.back() > 0) if max_t elapses before absorption.
BesselPath sample_excursion_height(double delta, double dt, double level, Rng& rng,
                                   double max_t = 1000.0);

} // namespace cle
