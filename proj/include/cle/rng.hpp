#pragma once
// Counter-based random number generation (Philox4x32-10) plus the handful of
// samplers the simulation needs. Everything is hand-rolled on top of the
// counter cipher so that a (seed, stream) pair yields the same bits on every
// platform and compiler; std::<distribution> implementations are not portable
// across standard libraries, which would break run manifests.

#include <array>
#include <cstdint>
#include <string>

namespace cle {

// Raw Philox4x32-10 block function. Exposed for the known-answer tests.
std::array<std::uint32_t, 4> philox4x32(const std::array<std::uint32_t, 4>& counter,
                                        const std::array<std::uint32_t, 2>& key);

// One logical random stream. Streams with distinct (seed, stream) pairs are
// statistically independent; substreams let replicated jobs derive their own
// streams deterministically no matter how work is scheduled across threads.
class Rng {
  public:
    Rng() : Rng(0, 0) {}
    Rng(std::uint64_t seed, std::uint64_t stream);

    std::uint64_t seed() const { return seed_; }
    std::uint64_t stream() const { return stream_; }

    // Derived stream: independent of this one, deterministic in (seed, stream, i).
    Rng substream(std::uint64_t i) const;

    std::uint32_t next_u32();
    std::uint64_t next_u64();

    // Uniform on (0,1), 53-bit mantissa, never exactly 0 or 1.
    double uniform();
    // Uniform on [lo, hi).
    double uniform(double lo, double hi);
    // Uniform integer in [0, n), n >= 1.
    std::uint64_t integer(std::uint64_t n);

    // Standard normal via Box-Muller (pairs cached; no rejection loop).
    double normal();

    // Gamma(shape, scale) via Marsaglia-Tsang, boosted for shape < 1.
    double gamma(double shape, double scale = 1.0);

    // Poisson(mean); exact for all means (inversion below 30, PTRD above).
    long long poisson(double mean);

    // Noncentral chi-square with `dof` degrees of freedom (dof > 0, possibly
    // fractional) and noncentrality `lambda` >= 0. Uses the Poisson mixture
    // for dof <= 1 and the normal-plus-central split otherwise.
    double noncentral_chisq(double dof, double lambda);

  private:
    std::uint64_t seed_ = 0;
    std::uint64_t stream_ = 0;
    std::uint64_t ctr_ = 0;
    std::array<std::uint32_t, 4> buf_{};
    int buf_pos_ = 4; // empty
    bool have_cached_normal_ = false;
    double cached_normal_ = 0.0;

    void refill();
};

// FNV-1a over a byte string; used for config hashes in run manifests.
std::uint64_t fnv1a64(const std::string& bytes);

} // namespace cle
