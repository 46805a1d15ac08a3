#include "cle/drivers.hpp"

#include "cle/pv.hpp"

#include <cmath>
#include <stdexcept>

namespace cle {

std::vector<double> excursion_marks(std::size_t n, Rng& rng) {
    std::vector<double> m(n);
    for (auto& v : m) v = rng.uniform();
    return m;
}

namespace {

// Boundary pieces of the excursion integral rest on a single sampled value
// whose law near zero makes 2 dt / y heavy tailed on the grid, while the true
// first-interval contribution is O(sqrt(dt)). Clip each piece at that scale
// so one unlucky sample cannot throw the driver; the pieces vanish in the
// small-step limit either way.
double endpoint_piece(double dt, double y) {
    return std::min(2.0 * dt / y, 5.0 * std::sqrt(2.0 * dt));
}

DrivenPath assemble(const BesselPath& path, const std::vector<double>& marks, double kappa,
                    double r, double macro_sign_p_plus, double macro_jump) {
    if (r * r < 4.0 * path.dt)
        throw std::invalid_argument("driver: r^2 below grid resolution, shrink dt or grow r");
    DrivenPath d;
    d.dt = path.dt;
    d.kappa = kappa;
    d.delta = path.delta;
    d.r = r;
    const double rk = std::sqrt(kappa);

    auto excs = decompose_excursions(path);
    if (marks.size() < excs.size())
        throw std::invalid_argument("driver: need one mark per complete excursion");

    d.excursions.reserve(excs.size());
    for (std::size_t j = 0; j < excs.size(); ++j) {
        DriverExcursion de;
        de.begin = excs[j].begin;
        de.end = excs[j].end;
        de.duration = excs[j].duration;
        de.macro = excs[j].duration >= r * r;
        double p_plus = de.macro ? macro_sign_p_plus : 0.5;
        de.sign = marks[j] < p_plus ? +1 : -1;
        d.excursions.push_back(de);
    }

    const std::size_t n = path.z.size();
    d.w.assign(n, 0.0);
    d.x.assign(n, 0.0);
    double level_i = 0.0;   // signed running integral
    double level_jump = 0.0;
    std::size_t cursor = 0;
    for (auto& de : d.excursions) {
        for (; cursor <= de.begin; ++cursor) d.w[cursor] = 2.0 * rk * level_i + level_jump;
        const double s = static_cast<double>(de.sign);
        double own = endpoint_piece(path.dt, path.y(de.begin + 1));
        level_i += s * own;
        d.x[cursor] = s * path.y(cursor);
        d.w[cursor] = rk * d.x[cursor] + 2.0 * rk * level_i + level_jump;
        ++cursor;
        for (std::size_t k = de.begin + 1; k + 1 < de.end; ++k) {
            double piece = 0.5 * path.dt * (1.0 / path.y(k) + 1.0 / path.y(k + 1));
            own += piece;
            level_i += s * piece;
            d.x[cursor] = s * path.y(cursor);
            d.w[cursor] = rk * d.x[cursor] + 2.0 * rk * level_i + level_jump;
            ++cursor;
        }
        double tail = endpoint_piece(path.dt, path.y(de.end - 1));
        own += tail;
        level_i += s * tail;
        de.i_value = own;
        if (de.macro) level_jump += macro_jump;
        d.w[cursor] = 2.0 * rk * level_i + level_jump; // x is 0 at the end zero
        ++cursor;
        d.usable_until = de.end;
    }
    // Freeze the driver across the trailing incomplete excursion.
    for (; cursor < n; ++cursor) d.w[cursor] = 2.0 * rk * level_i + level_jump;
    return d;
}

} // namespace

DrivenPath build_beta_driver(const BesselPath& path, const std::vector<double>& marks,
                             double kappa, double r, double beta, double c_value) {
    if (beta < -1.0 || beta > 1.0) throw std::invalid_argument("build_beta_driver: |beta| <= 1");
    const double delta = delta_from_kappa(kappa);
    if (std::fabs(delta - path.delta) > 1e-12)
        throw std::invalid_argument("build_beta_driver: path dimension does not match kappa");
    double jump = 0.0;
    if (beta != 0.0) {
        if (delta >= 1.0)
            throw std::invalid_argument(
                "build_beta_driver: biased signs need kappa < 4 (compensation diverges)");
        double c = std::isnan(c_value) ? c_constant_analytic(delta) : c_value;
        jump = -2.0 * std::sqrt(kappa) * beta * c * r;
    }
    return assemble(path, marks, kappa, r, 0.5 * (1.0 + beta), jump);
}

DrivenPath build_mu_driver(const BesselPath& path, const std::vector<double>& marks, double r,
                           double mu) {
    if (std::fabs(path.delta - 1.0) > 1e-12)
        throw std::invalid_argument("build_mu_driver: needs a dimension-1 path (kappa = 4)");
    return assemble(path, marks, 4.0, r, 0.5, 4.0 * mu * r);
}

double grid_c_estimate(double delta, double dt, double r, std::size_t min_macros, Rng& rng) {
    double sum = 0.0;
    std::size_t count = 0;
    while (count < min_macros) {
        BesselPath path = simulate_squared_bessel(delta, dt, 0.0, 4.0, rng);
        std::vector<double> marks(path.z.size(), 0.5);
        DrivenPath d = assemble(path, marks, 8.0 / (3.0 - delta), r, 0.5, 0.0);
        for (const auto& de : d.excursions)
            if (de.macro) {
                sum += de.i_value;
                ++count;
            }
    }
    return sum / static_cast<double>(count) / r;
}

std::vector<double> bubble_driver(const std::vector<double>& z, double dt, double kappa, int sign,
                                  double w0) {
    const std::size_t n = z.empty() ? 0 : z.size() - 1;
    if (n < 2 || z.front() != 0.0 || z.back() != 0.0)
        throw std::invalid_argument("bubble_driver: need a single excursion with zero endpoints");
    const double rk = std::sqrt(kappa);
    const double s = static_cast<double>(sign);
    std::vector<double> w(n + 1, w0);
    double level_i = endpoint_piece(dt, std::sqrt(z[1]));
    w[1] = w0 + s * (rk * std::sqrt(z[1]) + 2.0 * rk * level_i);
    for (std::size_t k = 1; k + 1 < n; ++k) {
        level_i += 0.5 * dt * (1.0 / std::sqrt(z[k]) + 1.0 / std::sqrt(z[k + 1]));
        w[k + 1] = w0 + s * (rk * std::sqrt(z[k + 1]) + 2.0 * rk * level_i);
    }
    level_i += endpoint_piece(dt, std::sqrt(z[n - 1]));
    w[n] = w0 + s * 2.0 * rk * level_i;
    return w;
}

} // namespace cle
