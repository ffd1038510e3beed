#pragma once

#include <cstdint>

namespace palmgrid {

// Platform-stable random numbers. The standard <random> distributions are
// implementation-defined, so everything that has to reproduce bit-for-bit
// across toolchains draws from these instead.

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Counter-based draw: the value depends only on (key, counter).
constexpr std::uint64_t hash_draw(std::uint64_t key, std::uint64_t counter) noexcept {
    return splitmix64(splitmix64(key) ^ splitmix64(counter + 0x632be59bd9b4e019ULL));
}

/// Uniform double in [0, 1) from the top 53 bits.
constexpr double to_unit_double(std::uint64_t bits) noexcept {
    return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

class Rng {
public:
    explicit Rng(std::uint64_t seed) noexcept : state_(seed) {}

    std::uint64_t next() noexcept {
        state_ += 0x9e3779b97f4a7c15ULL;
        return splitmix64(state_);
    }

    double uniform() noexcept { return to_unit_double(next()); }

    double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }

    /// Unbiased integer in [0, bound) (Lemire's multiply-shift with rejection).
    std::uint64_t below(std::uint64_t bound) noexcept;

    /// Standard normal via Box-Muller (one value per call, no caching).
    double normal() noexcept;

private:
    std::uint64_t state_;
};

} // namespace palmgrid
