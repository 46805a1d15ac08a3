#include "cle/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace cle {

namespace {

constexpr std::uint32_t kPhiloxM0 = 0xD2511F53u;
constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57u;
constexpr std::uint32_t kPhiloxW0 = 0x9E3779B9u;
constexpr std::uint32_t kPhiloxW1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
    std::uint64_t p = static_cast<std::uint64_t>(a) * b;
    hi = static_cast<std::uint32_t>(p >> 32);
    lo = static_cast<std::uint32_t>(p);
}

constexpr double kTwoPi = 6.283185307179586476925286766559;

} // namespace

std::array<std::uint32_t, 4> philox4x32(const std::array<std::uint32_t, 4>& counter,
                                        const std::array<std::uint32_t, 2>& key) {
    std::uint32_t c0 = counter[0], c1 = counter[1], c2 = counter[2], c3 = counter[3];
    std::uint32_t k0 = key[0], k1 = key[1];
    for (int round = 0; round < 10; ++round) {
        std::uint32_t hi0, lo0, hi1, lo1;
        mulhilo(kPhiloxM0, c0, hi0, lo0);
        mulhilo(kPhiloxM1, c2, hi1, lo1);
        std::uint32_t n0 = hi1 ^ c1 ^ k0;
        std::uint32_t n1 = lo1;
        std::uint32_t n2 = hi0 ^ c3 ^ k1;
        std::uint32_t n3 = lo0;
        c0 = n0; c1 = n1; c2 = n2; c3 = n3;
        k0 += kPhiloxW0;
        k1 += kPhiloxW1;
    }
    return {c0, c1, c2, c3};
}

Rng::Rng(std::uint64_t seed, std::uint64_t stream) : seed_(seed), stream_(stream) {}

Rng Rng::substream(std::uint64_t i) const {
    // Hash (stream, i) into a fresh stream id; FNV keeps this deterministic
    // and collision-free in practice for the modest substream counts we use.
    std::string bytes(16, '\0');
    for (int b = 0; b < 8; ++b) bytes[b] = static_cast<char>((stream_ >> (8 * b)) & 0xFF);
    for (int b = 0; b < 8; ++b) bytes[8 + b] = static_cast<char>((i >> (8 * b)) & 0xFF);
    return Rng(seed_, fnv1a64(bytes));
}

void Rng::refill() {
    std::array<std::uint32_t, 4> ctr = {
        static_cast<std::uint32_t>(ctr_),
        static_cast<std::uint32_t>(ctr_ >> 32),
        static_cast<std::uint32_t>(stream_),
        static_cast<std::uint32_t>(stream_ >> 32),
    };
    std::array<std::uint32_t, 2> key = {
        static_cast<std::uint32_t>(seed_),
        static_cast<std::uint32_t>(seed_ >> 32),
    };
    buf_ = philox4x32(ctr, key);
    ++ctr_;
    buf_pos_ = 0;
}

std::uint32_t Rng::next_u32() {
    if (buf_pos_ >= 4) refill();
    return buf_[buf_pos_++];
}

std::uint64_t Rng::next_u64() {
    std::uint64_t hi = next_u32();
    std::uint64_t lo = next_u32();
    return (hi << 32) | lo;
}

double Rng::uniform() {
    // 53 random bits into (0,1): (x + 0.5) / 2^53 with x in [0, 2^53).
    std::uint64_t x = next_u64() >> 11;
    return (static_cast<double>(x) + 0.5) * (1.0 / 9007199254740992.0);
}

double Rng::uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

std::uint64_t Rng::integer(std::uint64_t n) {
    if (n == 0) throw std::invalid_argument("Rng::integer: n must be positive");
    // Rejection to avoid modulo bias.
    std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x;
    do {
        x = next_u64();
    } while (x >= limit);
    return x % n;
}

double Rng::normal() {
    if (have_cached_normal_) {
        have_cached_normal_ = false;
        return cached_normal_;
    }
    double u1 = uniform();
    double u2 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    double z0 = r * std::cos(kTwoPi * u2);
    cached_normal_ = r * std::sin(kTwoPi * u2);
    have_cached_normal_ = true;
    return z0;
}

double Rng::gamma(double shape, double scale) {
    if (!(shape > 0.0) || !(scale > 0.0))
        throw std::invalid_argument("Rng::gamma: shape and scale must be positive");
    if (shape < 1.0) {
        // Boost: G(a) = G(a+1) * U^(1/a).
        double u = uniform();
        return gamma(shape + 1.0, scale) * std::pow(u, 1.0 / shape);
    }
    double d = shape - 1.0 / 3.0;
    double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        double x = normal();
        double t = 1.0 + c * x;
        if (t <= 0.0) continue;
        double v = t * t * t;
        double u = uniform();
        double x2 = x * x;
        if (u < 1.0 - 0.0331 * x2 * x2) return scale * d * v;
        if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return scale * d * v;
    }
}

long long Rng::poisson(double mean) {
    if (mean < 0.0 || !std::isfinite(mean))
        throw std::invalid_argument("Rng::poisson: mean must be finite and nonnegative");
    if (mean == 0.0) return 0;
    if (mean < 30.0) {
        // Multiplication method.
        double limit = std::exp(-mean);
        double prod = uniform();
        long long n = 0;
        while (prod > limit) {
            prod *= uniform();
            ++n;
        }
        return n;
    }
    // PTRD transformed rejection (Hormann 1993); exact for large means.
    double mu = mean;
    double smu = std::sqrt(mu);
    double b = 0.931 + 2.53 * smu;
    double a = -0.059 + 0.02483 * b;
    double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
    double vr = 0.9277 - 3.6224 / (b - 2.0);
    for (;;) {
        double u;
        double v = uniform();
        if (v <= 0.86 * vr) {
            u = v / vr - 0.43;
            return static_cast<long long>(
                std::floor((2.0 * a / (0.5 - std::fabs(u)) + b) * u + mu + 0.445));
        }
        if (v >= vr) {
            u = uniform() - 0.5;
        } else {
            u = v / vr - 0.93;
            u = (u < 0.0 ? -0.5 : 0.5) - u;
            v = uniform() * vr;
        }
        double us = 0.5 - std::fabs(u);
        if (us < 0.013 && v > us) continue;
        double k = std::floor((2.0 * a / us + b) * u + mu + 0.445);
        if (k < 0.0) continue;
        v = v * inv_alpha / (a / (us * us) + b);
        // Hormann's split acceptance (Stirling above k=10) collapses to this
        // single exact comparison once log k! is evaluated with lgamma.
        if (std::log(v) <= k * std::log(mu) - mu - std::lgamma(k + 1.0))
            return static_cast<long long>(k);
    }
}

double Rng::noncentral_chisq(double dof, double lambda) {
    if (!(dof > 0.0) || lambda < 0.0)
        throw std::invalid_argument("Rng::noncentral_chisq: bad parameters");
    if (dof > 1.0) {
        double n = normal() + std::sqrt(lambda);
        double rest = (dof > 1.0 + 1e-14) ? gamma((dof - 1.0) / 2.0, 2.0) : 0.0;
        return n * n + rest;
    }
    // dof <= 1: chi-square with a Poisson-mixed degree boost. This is the only
    // branch with mass at arbitrarily small values, which matters near zero.
    long long j = poisson(lambda / 2.0);
    return gamma(dof / 2.0 + static_cast<double>(j), 2.0);
}

std::uint64_t fnv1a64(const std::string& bytes) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

} // namespace cle
