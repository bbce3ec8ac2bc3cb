#ifndef RVMS_RNG_HPP
#define RVMS_RNG_HPP

#include <cstdint>

namespace rvms {

/**
 * @brief Deterministic pseudo-random number generator.
 *
 * xoshiro256** (Blackman & Vigna) with splitmix64 seed expansion. The same
 * 64-bit seed yields the same draw sequence on every run; there is no global
 * generator state. A generator is single-owner: parallel pipelines must take
 * independent child streams via split(), never share one instance.
 */
class SeededRng {
public:
    explicit SeededRng(std::uint64_t seed);

    /// Next raw 64-bit output.
    std::uint64_t next_u64();

    /// Uniform double in [0, 1), 53-bit resolution.
    double uniform();

    /// Uniform double in the open interval (0, 1).
    double uniform_open();

    /// Uniform double in [lo, hi).
    double uniform(double lo, double hi);

    /// Unbiased uniform integer in [0, n). Requires n >= 1.
    std::uint64_t uniform_below(std::uint64_t n);

    /// Uniform integer in [lo, hi], inclusive. Requires lo <= hi.
    int uniform_int(int lo, int hi);

    /// Gaussian draw via the Marsaglia polar method (second value cached).
    double normal(double mean, double sd);

    /// Independent child stream; advances this generator by one draw.
    SeededRng split();

    std::uint64_t seed() const { return seed_; }

private:
    std::uint64_t state_[4];
    std::uint64_t seed_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

} // namespace rvms

#endif
