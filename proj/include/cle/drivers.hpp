#pragma once
// Driving processes for loop-ensemble explorations, assembled excursion by
// excursion from a squared Bessel path. The driver is sqrt(kappa) X plus
// 2 sqrt(kappa) I, where X carries one orientation sign per excursion and I
// is the signed running integral of ds/y. Excursions of duration >= r^2 are
// "macro"; depending on the family they receive biased signs and an extra
// jump at their end.

#include "cle/bessel.hpp"
#include "cle/rng.hpp"

#include <cstddef>
#include <limits>
#include <vector>

namespace cle {

struct DriverExcursion {
    std::size_t begin = 0, end = 0;
    double duration = 0.0;
    bool macro = false;
    int sign = +1;
    double i_value = 0.0; // integral of ds/y over the excursion
};

struct DrivenPath {
    double dt = 0.0;
    double kappa = 0.0;
    double delta = 0.0;
    double r = 0.0;
    std::vector<double> w; // driver on the grid, right-continuous at jumps
    std::vector<double> x; // signed path component
    std::vector<DriverExcursion> excursions;
    // Grid index of the last exact zero: beyond it the path sits inside an
    // excursion whose macro status is still unknown, so w is frozen there.
    std::size_t usable_until = 0;
};

// One uniform mark per excursion index. Reusing the same marks across
// parameter values couples the sign choices monotonically.
std::vector<double> excursion_marks(std::size_t n, Rng& rng);

// Orientation-biased family for kappa in (8/3, 4): macro excursions get sign
// +1 with probability (1+beta)/2 and a jump -2 sqrt(kappa) beta C r at their
// end (C is the compensation constant); small excursions always toss fair
// coins. beta must be 0 when kappa = 4, where C diverges. Passing a finite
// c_value replaces the analytic C, letting callers compensate with the
// grid-measured mean of i over macro excursions instead of the limit value.
DrivenPath build_beta_driver(const BesselPath& path, const std::vector<double>& marks,
                             double kappa, double r, double beta,
                             double c_value = std::numeric_limits<double>::quiet_NaN());

// Drift family at kappa = 4: fair signs everywhere plus a jump +4 mu r at the
// end of each macro excursion.
DrivenPath build_mu_driver(const BesselPath& path, const std::vector<double>& marks, double r,
                           double mu);

// Mean assembled excursion integral over macro excursions at this grid
// resolution, in units of r, averaged over at least min_macros excursions.
// The assembled integral sits well below its continuum limit at practical
// step sizes (macro excursions near the duration cutoff span only a handful
// of grid steps, and the endpoint mass of ds/y is clipped), so compensating
// with the analytic constant would leave a net sign-bias drift. This value
// centers the compensation at the resolution the walk actually runs at.
double grid_c_estimate(double delta, double dt, double r, std::size_t min_macros, Rng& rng);

// Driving path of a single loop traced from one excursion given as squared
// values with z[0] = z[n] = 0: w0 + sign (sqrt(kappa) y(t) + 2 sqrt(kappa)
// int_0^t ds/y).
std::vector<double> bubble_driver(const std::vector<double>& z, double dt, double kappa, int sign,
                                  double w0);

} // namespace cle
