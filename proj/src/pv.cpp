#include "cle/pv.hpp"

#include "cle/stats.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace cle {

double excursion_i_integral(const std::vector<double>& z, double dt, std::size_t begin,
                            std::size_t end) {
    if (end <= begin + 1 || end >= z.size())
        throw std::invalid_argument("excursion_i_integral: bad index range");
    const double y_first = std::sqrt(z[begin + 1]);
    const double y_last = std::sqrt(z[end - 1]);
    // Boundary steps: with z ~ c*s near a zero, the exact integral over one
    // step is 2*dt/y at the first interior point.
    double total = 2.0 * dt / y_first + 2.0 * dt / y_last;
    for (std::size_t k = begin + 1; k + 1 < end; ++k)
        total += 0.5 * dt * (1.0 / std::sqrt(z[k]) + 1.0 / std::sqrt(z[k + 1]));
    return total;
}

double excursion_i_integral(const BesselPath& path, const ExcursionRef& e) {
    return excursion_i_integral(path.z, path.dt, e.begin, e.end);
}

double excursion_core_integral(const std::vector<double>& z, double dt, std::size_t begin,
                               std::size_t end, double clip_fraction) {
    if (end <= begin + 1 || end >= z.size())
        throw std::invalid_argument("excursion_core_integral: bad index range");
    const auto len = static_cast<double>(end - begin);
    auto clip = static_cast<std::size_t>(std::ceil(clip_fraction * len));
    if (clip < 1) clip = 1;
    const std::size_t lo = begin + clip, hi = end - clip;
    if (hi <= lo) return 0.0;
    double total = 0.0;
    for (std::size_t k = lo; k < hi; ++k)
        total += 0.5 * dt * (1.0 / std::sqrt(z[k]) + 1.0 / std::sqrt(z[k + 1]));
    return total;
}

std::vector<double> signed_pv_profile(const BesselPath& path,
                                      const std::vector<ExcursionRef>& excursions,
                                      const std::vector<int>& signs) {
    if (signs.size() != excursions.size())
        throw std::invalid_argument("signed_pv_profile: one sign per excursion");
    std::vector<double> profile(path.z.size(), 0.0);
    std::size_t cursor = 0;
    double level = 0.0;
    for (std::size_t j = 0; j < excursions.size(); ++j) {
        const auto& e = excursions[j];
        const double s = static_cast<double>(signs[j]);
        for (; cursor <= e.begin; ++cursor) profile[cursor] = level;
        // First boundary step, interior trapezoids, last boundary step.
        level += s * 2.0 * path.dt / path.y(e.begin + 1);
        profile[cursor++] = level;
        for (std::size_t k = e.begin + 1; k + 1 < e.end; ++k) {
            level += s * 0.5 * path.dt * (1.0 / path.y(k) + 1.0 / path.y(k + 1));
            profile[cursor++] = level;
        }
        level += s * 2.0 * path.dt / path.y(e.end - 1);
        if (e.end > e.begin + 1) profile[cursor++] = level;
    }
    for (; cursor < profile.size(); ++cursor) profile[cursor] = level;
    return profile;
}

std::vector<double> harvest_scaled_integrals(double delta, double dt, double t_total, double s0,
                                             Rng& rng) {
    auto path = simulate_squared_bessel(delta, dt, 0.0, t_total, rng);
    std::vector<double> out;
    const double root_s0 = std::sqrt(s0);
    for (const auto& e : decompose_excursions(path))
        if (e.duration >= s0) out.push_back(excursion_i_integral(path, e) / root_s0);
    return out;
}

namespace {

CEstimate summarize(const std::vector<double>& samples) {
    CEstimate c;
    c.n = samples.size();
    c.value = mean_of(samples);
    c.stderr_ = stderr_of(samples);
    return c;
}

} // namespace

CEstimate estimate_c_harvest(double delta, double dt, double t_total, double s0, int n_paths,
                             Rng& rng) {
    std::vector<double> all;
    for (int p = 0; p < n_paths; ++p) {
        auto part = harvest_scaled_integrals(delta, dt, t_total, s0, rng);
        all.insert(all.end(), part.begin(), part.end());
    }
    return summarize(all);
}

CEstimate estimate_unit_integral_bridge(double delta, std::size_t n_samples, std::size_t n_steps,
                                        Rng& rng) {
    std::vector<double> vals;
    vals.reserve(n_samples);
    for (std::size_t k = 0; k < n_samples; ++k) {
        auto z = sample_excursion_bridge(delta, 1.0, n_steps, rng);
        vals.push_back(excursion_i_integral(z, 1.0 / static_cast<double>(n_steps), 0, n_steps));
    }
    return summarize(vals);
}

CEstimate estimate_c_bridge(double delta, std::size_t n_samples, std::size_t n_steps, Rng& rng) {
    if (delta >= 1.0)
        throw std::invalid_argument("estimate_c_bridge: constant diverges for delta >= 1");
    CEstimate unit = estimate_unit_integral_bridge(delta, n_samples, n_steps, rng);
    const double factor = (2.0 - delta) / (1.0 - delta);
    unit.value *= factor;
    unit.stderr_ *= factor;
    return unit;
}

double unit_excursion_integral_analytic(double delta) {
    return M_PI * std::tgamma((3.0 - delta) / 2.0) /
           (std::sqrt(2.0) * std::tgamma(2.0 - delta / 2.0));
}

double c_constant_analytic(double delta) {
    if (delta >= 1.0) return std::numeric_limits<double>::infinity();
    return unit_excursion_integral_analytic(delta) * (2.0 - delta) / (1.0 - delta);
}

} // namespace cle
