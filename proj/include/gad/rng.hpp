#pragma once

#include <cmath>
#include <cstdint>

namespace gad {

// SplitMix64 (Steele, Lea, Flood 2014). Used both as the stream generator and
// as the seed-mixing function, so every derived stream is a pure function of
// (master_seed, index) and results are reproducible at any worker count.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t index) {
    return splitmix64(master_seed ^ index);
}

class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        state_ += 0x9E3779B97F4A7C15ULL;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    // Uniform in [0, 1).
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // Uniform integer in [0, bound). bound must be > 0.
    std::uint64_t next_below(std::uint64_t bound) {
        return next_u64() % bound;
    }

    // Uniform integer in [lo, hi], both inclusive (RandInt(a,b) convention).
    std::int64_t next_int(std::int64_t lo, std::int64_t hi) {
        return lo + static_cast<std::int64_t>(next_below(static_cast<std::uint64_t>(hi - lo + 1)));
    }

    // Uniform real in [a, b).
    double next_uniform(double a, double b) {
        return a + (b - a) * next_double();
    }

    // Standard normal via Box-Muller (cosine branch only, no cached state).
    double next_normal() {
        double u1 = next_double();
        double u2 = next_double();
        while (u1 == 0.0) u1 = next_double();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586477 * u2);
    }

private:
    std::uint64_t state_;
};

} // namespace gad
