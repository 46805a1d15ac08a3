#include "cle/loewner.hpp"

#include <cmath>
#include <stdexcept>

namespace cle {

namespace {

// Square root with nonnegative imaginary part; on the real axis the sign of
// re_hint picks the branch that is continuous from that side.
std::complex<double> upper_sqrt(std::complex<double> q, double re_hint) {
    if (q.imag() == 0.0 && q.real() >= 0.0) {
        double root = std::sqrt(q.real());
        return {re_hint < 0.0 ? -root : root, 0.0};
    }
    std::complex<double> s = std::sqrt(q);
    if (s.imag() < 0.0) s = -s;
    return s;
}

} // namespace

std::complex<double> slit_step(std::complex<double> z, double xi, double h) {
    std::complex<double> d = z - xi;
    return xi + upper_sqrt(d * d + 4.0 * h, d.real());
}

std::complex<double> slit_step_derivative(std::complex<double> z, double xi, double h) {
    std::complex<double> d = z - xi;
    return d / upper_sqrt(d * d + 4.0 * h, d.real());
}

std::complex<double> slit_step_inverse(std::complex<double> w, double xi, double h) {
    std::complex<double> d = w - xi;
    return xi + upper_sqrt(d * d - 4.0 * h, d.real());
}

void TrackedPoint::advance(double xi, double h, double swallow_tol) {
    if (swallowed) return;
    std::complex<double> d = z - xi;
    if (std::abs(d) <= swallow_tol || z.imag() < 0.0) {
        swallowed = true;
        return;
    }
    std::complex<double> s = upper_sqrt(d * d + 4.0 * h, d.real());
    if (track_derivative) dz *= d / s;
    z = xi + s;
    ++steps_done;
}

double conformal_radius(const TrackedPoint& p) {
    return 2.0 * p.z.imag() / std::abs(p.dz);
}

TrackedPoint evolve_point(const std::vector<double>& w, double dt, std::complex<double> z0,
                          std::size_t first_step, std::size_t last_step, double swallow_tol) {
    if (w.size() < 2) throw std::invalid_argument("evolve_point: need at least one step");
    if (last_step > w.size() - 1) last_step = w.size() - 1;
    TrackedPoint p(z0);
    for (std::size_t k = first_step; k < last_step && !p.swallowed; ++k)
        p.advance(w[k], dt, swallow_tol);
    return p;
}

std::complex<double> trace_tip(const std::vector<double>& w, double dt, std::size_t k) {
    if (k == 0 || k >= w.size()) throw std::invalid_argument("trace_tip: step out of range");
    std::complex<double> p(w[k], 0.0);
    for (std::size_t j = k; j-- > 0;) p = slit_step_inverse(p, w[j], dt);
    return p;
}

std::vector<std::complex<double>> trace_points(const std::vector<double>& w, double dt,
                                               std::size_t stride) {
    if (stride == 0) stride = 1;
    std::vector<std::complex<double>> pts;
    for (std::size_t k = stride; k < w.size(); k += stride) pts.push_back(trace_tip(w, dt, k));
    return pts;
}

Moebius Moebius::compose(const Moebius& o) const {
    return {a * o.a + b * o.c, a * o.b + b * o.d, c * o.a + d * o.c, c * o.b + d * o.d};
}

Moebius Moebius::inverse() const {
    return {d, -b, -c, a};
}

Moebius Moebius::affine_to_i(std::complex<double> zeta) {
    if (!(zeta.imag() > 0.0)) throw std::invalid_argument("affine_to_i: need an interior point");
    return {1.0, -zeta.real(), 0.0, zeta.imag()};
}

Moebius Moebius::rotation_about_i(double phi) {
    double t = 0.5 * phi;
    return {std::cos(t), std::sin(t), -std::sin(t), std::cos(t)};
}

std::complex<double> cayley(std::complex<double> z) {
    const std::complex<double> i(0.0, 1.0);
    return (z - i) / (z + i);
}

std::complex<double> cayley_derivative(std::complex<double> z) {
    const std::complex<double> i(0.0, 1.0);
    std::complex<double> q = z + i;
    return 2.0 * i / (q * q);
}

std::complex<double> cut_map(std::complex<double> z, double eps) {
    return z + eps * eps / z;
}

} // namespace cle
