#include "cle/bessel.hpp"

#include <cmath>
#include <stdexcept>

namespace cle {

double delta_from_kappa(double kappa) {
    if (!(kappa > 8.0 / 3.0) || kappa > 4.0)
        throw std::invalid_argument("delta_from_kappa: kappa must lie in (8/3, 4]");
    return 3.0 - 8.0 / kappa;
}

double kappa_from_delta(double delta) {
    if (delta <= 0.0 || delta > 1.0)
        throw std::invalid_argument("kappa_from_delta: delta must lie in (0, 1]");
    return 8.0 / (3.0 - delta);
}

double BesselPath::y(std::size_t i) const { return std::sqrt(z[i]); }

namespace {

// Sum of the modified Bessel series I_nu(a) = (a/2)^nu * S(nu, a) with
// S(nu, a) = sum_k (a^2/4)^k / (k! Gamma(nu+k+1)). Valid for nu > -1.
double bessel_i_series_sum(double nu, double a) {
    const double q = a * a / 4.0;
    double term = 1.0 / std::tgamma(nu + 1.0);
    double sum = term;
    for (int k = 1; k < 200; ++k) {
        term *= q / (static_cast<double>(k) * (nu + static_cast<double>(k)));
        sum += term;
        if (term < sum * 1e-17) break;
    }
    return sum;
}

constexpr double kZeroFloorFactor = 1e-6; // times dt; below this a value is a zero

double besq_step(double delta, double dt, double z, Rng& rng) {
    return dt * rng.noncentral_chisq(delta, z / dt);
}

// One grid step with the zero rules: hard floor for tiny values, then the
// bridge hit test between two positive endpoints. When the test fires, the
// smaller endpoint is snapped to 0 (possibly rewriting the previous value,
// which is safe because only decomposition looks at it afterwards).
void advance(BesselPath& p, std::size_t n_steps, Rng& rng) {
    const double floor_z = p.dt * kZeroFloorFactor;
    p.z.reserve(p.z.size() + n_steps);
    for (std::size_t k = 0; k < n_steps; ++k) {
        double prev = p.z.back();
        double next = besq_step(p.delta, p.dt, prev, rng);
        if (next < floor_z) next = 0.0;
        if (prev > 0.0 && next > 0.0) {
            double ph = bridge_zero_probability(p.delta, prev, next, p.dt);
            if (ph > 0.0 && rng.uniform() < ph) {
                if (next <= prev)
                    next = 0.0;
                else
                    p.z.back() = 0.0;
            }
        }
        p.z.push_back(next);
    }
}

} // namespace

double bridge_zero_probability(double delta, double z0, double z1, double h) {
    if (delta <= 0.0 || delta >= 2.0)
        throw std::invalid_argument("bridge_zero_probability: need delta in (0, 2)");
    if (z0 <= 0.0 || z1 <= 0.0) return 1.0;
    const double nu = 1.0 - delta / 2.0; // in (0, 1)
    const double a = std::sqrt(z0 * z1) / h;
    if (a > 350.0) return 0.0;
    if (a > 15.0) {
        // Large-argument form with the first correction term kept so the
        // series and asymptotic branches agree at the switch point.
        double corr = 1.0 + (4.0 * nu * nu - 1.0) / (4.0 * a);
        return 2.0 * std::sin(M_PI * nu) * std::exp(-2.0 * a) * corr;
    }
    // P(no hit) = I_nu(a) / I_{-nu}(a); both series have positive terms.
    double ratio = std::pow(a / 2.0, 2.0 * nu) * bessel_i_series_sum(nu, a) /
                   bessel_i_series_sum(-nu, a);
    if (ratio > 1.0) ratio = 1.0;
    return 1.0 - ratio;
}

BesselPath simulate_squared_bessel(double delta, double dt, double z0, double t_max, Rng& rng) {
    if (delta <= 0.0 || delta >= 2.0)
        throw std::invalid_argument("simulate_squared_bessel: need delta in (0, 2)");
    if (dt <= 0.0 || t_max < dt) throw std::invalid_argument("simulate_squared_bessel: bad grid");
    BesselPath p;
    p.delta = delta;
    p.dt = dt;
    p.z.push_back(z0 < dt * kZeroFloorFactor ? 0.0 : z0);
    advance(p, static_cast<std::size_t>(std::llround(t_max / dt)), rng);
    return p;
}

void extend_squared_bessel(BesselPath& path, double additional_t, Rng& rng) {
    if (path.z.empty()) throw std::invalid_argument("extend_squared_bessel: empty path");
    advance(path, static_cast<std::size_t>(std::llround(additional_t / path.dt)), rng);
}

std::vector<ExcursionRef> decompose_excursions(const BesselPath& path, bool complete) {
    std::vector<ExcursionRef> out;
    const auto& z = path.z;
    const std::size_t n = z.size();
    std::size_t i = 0;
    while (i < n) {
        if (z[i] <= 0.0) {
            ++i;
            continue;
        }
        std::size_t j = i;
        while (j < n && z[j] > 0.0) ++j;
        const bool left_closed = i > 0;
        const bool right_closed = j < n;
        std::size_t b = left_closed ? i - 1 : i;
        std::size_t e = right_closed ? j : n - 1;
        if (e > b && (!complete || (left_closed && right_closed)))
            out.push_back({b, e, path.dt * static_cast<double>(e - b)});
        i = j;
    }
    return out;
}

std::vector<double> sample_excursion_bridge(double delta, double duration, std::size_t n,
                                            Rng& rng) {
    if (n < 2) throw std::invalid_argument("sample_excursion_bridge: need at least 2 steps");
    const double dprime = 4.0 - delta;
    const double h = duration / static_cast<double>(n);
    std::vector<double> z(n + 1, 0.0);
    for (std::size_t k = 0; k + 1 < n; ++k) {
        // Exponentially tilted transition of the bridge to 0 at the deadline.
        double rcur = duration - static_cast<double>(k) * h;
        double rnext = rcur - h;
        double scale = h * rnext / rcur;
        double lambda = (z[k] / h) * (rnext / rcur);
        z[k + 1] = scale * rng.noncentral_chisq(dprime, lambda);
    }
    return z;
}

double sample_excursion_duration(double delta, double s0, Rng& rng) {
    const double alpha = 1.0 - delta / 2.0;
    return s0 * std::pow(rng.uniform(), -1.0 / alpha);
}

BesselPath sample_excursion_height(double delta, double dt, double level, Rng& rng, double max_t) {
    if (level <= 0.0) throw std::invalid_argument("sample_excursion_height: level must be > 0");
    BesselPath p;
    p.delta = delta;
    p.dt = dt;
    p.z.push_back(0.0);
    const double target = level * level;
    const double dup = 4.0 - delta;
    const std::size_t cap = static_cast<std::size_t>(std::llround(max_t / dt));
    // Upcrossing leg: the conditioned-to-rise dimension never revisits 0.
    while (p.z.back() < target && p.z.size() <= cap)
        p.z.push_back(besq_step(dup, dt, p.z.back(), rng));
    // Descent leg: plain dimension-delta dynamics run to the first zero.
    const double floor_z = dt * kZeroFloorFactor;
    while (p.z.back() > 0.0 && p.z.size() <= cap) {
        double prev = p.z.back();
        double next = besq_step(delta, dt, prev, rng);
        if (next < floor_z) next = 0.0;
        if (next > 0.0) {
            double ph = bridge_zero_probability(delta, prev, next, dt);
            if (ph > 0.0 && rng.uniform() < ph) {
                // The step straddled the absorption time; end the excursion
                // at whichever endpoint is smaller and drop the rest.
                if (next > prev) {
                    p.z.back() = 0.0;
                    break;
                }
                next = 0.0;
            }
        }
        p.z.push_back(next);
    }
    return p;
}

} // namespace cle
