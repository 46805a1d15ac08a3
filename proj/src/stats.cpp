#include "cle/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace cle {

double ks_q(double lambda) {
    if (lambda <= 0.0) return 1.0;
    if (lambda < 0.2) return 1.0;
    double sum = 0.0;
    double sign = 1.0;
    for (int k = 1; k <= 200; ++k) {
        double term = sign * std::exp(-2.0 * k * k * lambda * lambda);
        sum += term;
        sign = -sign;
        if (std::fabs(term) < 1e-16) break;
    }
    return std::clamp(2.0 * sum, 0.0, 1.0);
}

namespace {

double ks_p_from_stat(double d, double ne) {
    double sq = std::sqrt(ne);
    return ks_q((sq + 0.12 + 0.11 / sq) * d);
}

} // namespace

KsResult ks_two_sample(std::vector<double> a, std::vector<double> b) {
    if (a.empty() || b.empty()) throw std::invalid_argument("ks_two_sample: empty sample");
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    std::size_t i = 0, j = 0;
    double d = 0.0;
    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());
    while (i < a.size() && j < b.size()) {
        double xa = a[i], xb = b[j];
        if (xa <= xb) ++i;
        if (xb <= xa) ++j;
        d = std::max(d, std::fabs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
    }
    KsResult r;
    r.statistic = d;
    r.n1 = a.size();
    r.n2 = b.size();
    r.p_value = ks_p_from_stat(d, na * nb / (na + nb));
    return r;
}

KsResult ks_one_sample(std::vector<double> a, const std::function<double(double)>& cdf) {
    if (a.empty()) throw std::invalid_argument("ks_one_sample: empty sample");
    std::sort(a.begin(), a.end());
    double d = 0.0;
    const double n = static_cast<double>(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        double f = cdf(a[i]);
        d = std::max(d, std::fabs(f - static_cast<double>(i) / n));
        d = std::max(d, std::fabs(static_cast<double>(i + 1) / n - f));
    }
    KsResult r;
    r.statistic = d;
    r.n1 = a.size();
    r.n2 = 0;
    r.p_value = ks_p_from_stat(d, n);
    return r;
}

double gamma_p(double a, double x) {
    if (x < 0.0 || a <= 0.0) throw std::invalid_argument("gamma_p: bad arguments");
    if (x == 0.0) return 0.0;
    if (x < a + 1.0) {
        // Series representation.
        double ap = a;
        double sum = 1.0 / a;
        double del = sum;
        for (int n = 0; n < 500; ++n) {
            ap += 1.0;
            del *= x / ap;
            sum += del;
            if (std::fabs(del) < std::fabs(sum) * 1e-15) break;
        }
        return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
    }
    return 1.0 - gamma_q(a, x);
}

double gamma_q(double a, double x) {
    if (x < 0.0 || a <= 0.0) throw std::invalid_argument("gamma_q: bad arguments");
    if (x == 0.0) return 1.0;
    if (x < a + 1.0) return 1.0 - gamma_p(a, x);
    // Continued fraction, modified Lentz.
    const double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= 500; ++i) {
        double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < 1e-15) break;
    }
    return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

double chisq_sf(double x, double k) {
    if (x <= 0.0) return 1.0;
    return gamma_q(k / 2.0, x / 2.0);
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

ChiSquareResult chisq_gof(const std::vector<double>& observed, const std::vector<double>& expected,
                          int extra_constraints, double min_expected) {
    if (observed.size() != expected.size() || observed.empty())
        throw std::invalid_argument("chisq_gof: size mismatch");
    // Merge under-filled bins from the right into their left neighbour.
    std::vector<double> obs, exp;
    for (std::size_t i = 0; i < observed.size(); ++i) {
        obs.push_back(observed[i]);
        exp.push_back(expected[i]);
    }
    for (std::size_t i = exp.size(); i-- > 1;) {
        if (exp[i] < min_expected) {
            exp[i - 1] += exp[i];
            obs[i - 1] += obs[i];
            exp.erase(exp.begin() + static_cast<std::ptrdiff_t>(i));
            obs.erase(obs.begin() + static_cast<std::ptrdiff_t>(i));
        }
    }
    if (!exp.empty() && exp.front() < min_expected && exp.size() > 1) {
        exp[1] += exp[0];
        obs[1] += obs[0];
        exp.erase(exp.begin());
        obs.erase(obs.begin());
    }
    ChiSquareResult r;
    r.bins_used = static_cast<int>(exp.size());
    r.dof = r.bins_used - 1 - extra_constraints;
    if (r.dof < 1) {
        r.dof = 0;
        r.p_value = 1.0;
        return r;
    }
    double stat = 0.0;
    for (std::size_t i = 0; i < exp.size(); ++i) {
        double diff = obs[i] - exp[i];
        if (exp[i] > 0.0) stat += diff * diff / exp[i];
    }
    r.statistic = stat;
    r.p_value = chisq_sf(stat, static_cast<double>(r.dof));
    return r;
}

ChiSquareResult geometric_fit_test(const std::vector<long long>& samples) {
    if (samples.empty()) throw std::invalid_argument("geometric_fit_test: empty sample");
    double mean = 0.0;
    long long max_v = 1;
    for (long long s : samples) {
        if (s < 1) throw std::invalid_argument("geometric_fit_test: support is 1,2,...");
        mean += static_cast<double>(s);
        max_v = std::max(max_v, s);
    }
    mean /= static_cast<double>(samples.size());
    double p = 1.0 / mean;
    const double n = static_cast<double>(samples.size());
    std::vector<double> obs(static_cast<std::size_t>(max_v), 0.0);
    for (long long s : samples) obs[static_cast<std::size_t>(s - 1)] += 1.0;
    std::vector<double> exp(static_cast<std::size_t>(max_v), 0.0);
    for (std::size_t k = 0; k < exp.size(); ++k)
        exp[k] = n * p * std::pow(1.0 - p, static_cast<double>(k));
    // Whatever upper tail the finite table misses goes to the last bin.
    double tail = n * std::pow(1.0 - p, static_cast<double>(max_v));
    exp.back() += tail;
    return chisq_gof(obs, exp, /*extra_constraints=*/1);
}

TailFit tail_exponent(const std::vector<double>& samples, double x_min, double x_max,
                      int grid_points) {
    TailFit out;
    if (samples.empty() || !(x_max > x_min) || x_min <= 0.0 || grid_points < 3) return out;
    std::vector<double> sorted(samples);
    std::sort(sorted.begin(), sorted.end());
    const double n = static_cast<double>(sorted.size());
    std::vector<double> lx, ly;
    for (int g = 0; g < grid_points; ++g) {
        double x = x_min * std::pow(x_max / x_min,
                                    static_cast<double>(g) / static_cast<double>(grid_points - 1));
        auto it = std::lower_bound(sorted.begin(), sorted.end(), x);
        double surv = static_cast<double>(sorted.end() - it) / n;
        if (surv <= 0.0) break;
        lx.push_back(std::log(x));
        ly.push_back(std::log(surv));
    }
    if (lx.size() < 3) return out;
    LineFit lf = linear_fit(lx, ly);
    out.exponent = lf.slope;
    out.stderr_ = lf.slope_stderr;
    out.points = static_cast<int>(lx.size());
    // Quadratic refit to flag curvature (systematic bend in the log-log plot).
    const std::size_t m = lx.size();
    double sx = 0, sx2 = 0, sx3 = 0, sx4 = 0, sy = 0, sxy = 0, sx2y = 0;
    for (std::size_t i = 0; i < m; ++i) {
        double x = lx[i], y = ly[i];
        sx += x; sx2 += x * x; sx3 += x * x * x; sx4 += x * x * x * x;
        sy += y; sxy += x * y; sx2y += x * x * y;
    }
    double dm = static_cast<double>(m);
    double a[3][4] = {{dm, sx, sx2, sy}, {sx, sx2, sx3, sxy}, {sx2, sx3, sx4, sx2y}};
    double det = dm * (sx2 * sx4 - sx3 * sx3) - sx * (sx * sx4 - sx3 * sx2) +
                 sx2 * (sx * sx3 - sx2 * sx2);
    if (std::fabs(det) > 1e-12) {
        // Gaussian elimination with partial pivoting on the augmented system.
        for (int col = 0; col < 3; ++col) {
            int piv = col;
            for (int r = col + 1; r < 3; ++r)
                if (std::fabs(a[r][col]) > std::fabs(a[piv][col])) piv = r;
            std::swap(a[col], a[piv]);
            for (int r = col + 1; r < 3; ++r) {
                double f = a[r][col] / a[col][col];
                for (int c = col; c < 4; ++c) a[r][c] -= f * a[col][c];
            }
        }
        double c2 = a[2][3] / a[2][2];
        double c1 = (a[1][3] - a[1][2] * c2) / a[1][1];
        double c0 = (a[0][3] - a[0][1] * c1 - a[0][2] * c2) / a[0][0];
        double rss = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            double fit = c0 + c1 * lx[i] + c2 * lx[i] * lx[i];
            rss += (ly[i] - fit) * (ly[i] - fit);
        }
        double sigma2 = (m > 3) ? rss / static_cast<double>(m - 3) : 0.0;
        double var_c2 = sigma2 * (dm * sx2 - sx * sx) / det;
        out.curvature = c2;
        if (var_c2 > 0.0) {
            out.curvature_z = c2 / std::sqrt(var_c2);
            out.curvature_flag = std::fabs(out.curvature_z) > 3.0;
        }
    }
    return out;
}

std::vector<double> holm_adjust(const std::vector<double>& p_values) {
    const std::size_t m = p_values.size();
    std::vector<std::size_t> order(m);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return p_values[a] < p_values[b]; });
    std::vector<double> adjusted(m, 0.0);
    double running = 0.0;
    for (std::size_t k = 0; k < m; ++k) {
        double adj = static_cast<double>(m - k) * p_values[order[k]];
        running = std::max(running, std::min(1.0, adj));
        adjusted[order[k]] = running;
    }
    return adjusted;
}

bool binomial_within_3sigma(long long successes, long long n, double p) {
    if (n <= 0) return false;
    double phat = static_cast<double>(successes) / static_cast<double>(n);
    if (p <= 0.0) return successes == 0;
    if (p >= 1.0) return successes == n;
    double sigma = std::sqrt(p * (1.0 - p) / static_cast<double>(n));
    return std::fabs(phat - p) <= 3.0 * sigma;
}

LogisticFit logistic_slope(const std::vector<double>& x, const std::vector<int>& y) {
    LogisticFit out;
    if (x.size() != y.size() || x.size() < 4) return out;
    double b0 = 0.0, b1 = 0.0;
    const std::size_t n = x.size();
    for (int iter = 0; iter < 50; ++iter) {
        double g0 = 0, g1 = 0, h00 = 0, h01 = 0, h11 = 0;
        for (std::size_t i = 0; i < n; ++i) {
            double eta = b0 + b1 * x[i];
            double mu = 1.0 / (1.0 + std::exp(-eta));
            double w = mu * (1.0 - mu);
            double r = static_cast<double>(y[i]) - mu;
            g0 += r;
            g1 += r * x[i];
            h00 += w;
            h01 += w * x[i];
            h11 += w * x[i] * x[i];
        }
        double det = h00 * h11 - h01 * h01;
        if (std::fabs(det) < 1e-12) return out;
        double d0 = (h11 * g0 - h01 * g1) / det;
        double d1 = (h00 * g1 - h01 * g0) / det;
        b0 += d0;
        b1 += d1;
        if (std::fabs(d0) + std::fabs(d1) < 1e-10) {
            out.converged = true;
            out.slope = b1;
            out.stderr_ = std::sqrt(h00 / det);
            return out;
        }
    }
    out.slope = b1;
    return out;
}

LineFit linear_fit(const std::vector<double>& x, const std::vector<double>& y) {
    LineFit out;
    if (x.size() != y.size() || x.size() < 2) return out;
    const double n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    double den = n * sxx - sx * sx;
    if (std::fabs(den) < 1e-300) return out;
    out.slope = (n * sxy - sx * sy) / den;
    out.intercept = (sy - out.slope * sx) / n;
    if (x.size() > 2) {
        double rss = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            double r = y[i] - out.intercept - out.slope * x[i];
            rss += r * r;
        }
        double sigma2 = rss / (n - 2.0);
        out.slope_stderr = std::sqrt(n * sigma2 / den);
    }
    return out;
}

double mean_of(const std::vector<double>& v) {
    if (v.empty()) return 0.0;
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double stderr_of(const std::vector<double>& v) {
    if (v.size() < 2) return 0.0;
    double m = mean_of(v);
    double s2 = 0.0;
    for (double x : v) s2 += (x - m) * (x - m);
    s2 /= static_cast<double>(v.size() - 1);
    return std::sqrt(s2 / static_cast<double>(v.size()));
}

} // namespace cle
