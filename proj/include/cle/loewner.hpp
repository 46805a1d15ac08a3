#pragma once

#include <complex>
#include <cstddef>
#include <vector>

namespace cle {

// Chordal Loewner chain discretized with vertical-slit maps. Each step of
// capacity duration h with driving value xi applies
//     G(z) = xi + sqrt((z - xi)^2 + 4 h),
// the branch with nonnegative imaginary part. A driving sequence sampled at
// grid points w[0..n] defines n steps; step k uses the left endpoint w[k].

// One slit step applied to an interior or boundary point. Real inputs stay
// real, with the branch chosen by the side of the driving value.
std::complex<double> slit_step(std::complex<double> z, double xi, double h);

// Derivative of the step at z. Undefined at z == xi.
std::complex<double> slit_step_derivative(std::complex<double> z, double xi, double h);

// Inverse step F(w) = xi + sqrt((w - xi)^2 - 4 h), again the upper branch.
// Maps the half plane onto the complement of the slit.
std::complex<double> slit_step_inverse(std::complex<double> w, double xi, double h);

// A point carried through the chain together with the accumulated derivative
// of the composed map. Once the image comes within swallow_tol of the driving
// value the point is absorbed: state freezes at the pre-step value so the
// conformal radius at capture can still be read off.
struct TrackedPoint {
    std::complex<double> z;
    std::complex<double> dz{1.0, 0.0};
    bool swallowed = false;
    bool track_derivative = true; // probes skip the derivative product
    std::size_t steps_done = 0;

    explicit TrackedPoint(std::complex<double> start = {0.0, 1.0}) : z(start) {}

    void advance(double xi, double h, double swallow_tol);
};

// Conformal radius of the evolving domain seen from the tracked point's
// start, in half-plane normalization: 2 Im(g) / |g'|. Halve it for the unit
// disk seen from the image of i under the Cayley map.
double conformal_radius(const TrackedPoint& p);

// Evolve one point through steps [first, last) of the driving grid.
TrackedPoint evolve_point(const std::vector<double>& w, double dt, std::complex<double> z0,
                          std::size_t first_step, std::size_t last_step, double swallow_tol);

// Tip of the curve after step k, via the reverse composition
// F_1(F_2(... F_k(w[k]))). O(k) per call.
std::complex<double> trace_tip(const std::vector<double>& w, double dt, std::size_t k);

// Tips after steps stride, 2*stride, ... up to the end of the grid.
std::vector<std::complex<double>> trace_points(const std::vector<double>& w, double dt,
                                               std::size_t stride);

// Real Moebius automorphism (a z + b) / (c z + d) of the half plane,
// a d - b c > 0.
struct Moebius {
    double a = 1.0, b = 0.0, c = 0.0, d = 1.0;

    std::complex<double> operator()(std::complex<double> z) const {
        return (a * z + b) / (c * z + d);
    }
    std::complex<double> deriv(std::complex<double> z) const {
        std::complex<double> q = c * z + d;
        return (a * d - b * c) / (q * q);
    }
    // this after other: (*this)(other(z)).
    Moebius compose(const Moebius& other) const;
    Moebius inverse() const;

    // Affine map sending zeta to i: (z - Re zeta) / Im zeta.
    static Moebius affine_to_i(std::complex<double> zeta);
    // Stabilizer of i with derivative e^{i phi} there (rotation by phi in
    // disk coordinates).
    static Moebius rotation_about_i(double phi);
};

// Cayley map (z - i)/(z + i) from the half plane to the unit disk, i -> 0,
// |derivative at i| = 1/2.
std::complex<double> cayley(std::complex<double> z);
std::complex<double> cayley_derivative(std::complex<double> z);

// Radial cut map z + eps^2 / z, removing the half disk of radius eps at the
// origin; its half-plane capacity matches a Loewner run of duration eps^2/2.
std::complex<double> cut_map(std::complex<double> z, double eps);

} // namespace cle
