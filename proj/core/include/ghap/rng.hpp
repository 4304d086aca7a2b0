#pragma once

#include <cstdint>

namespace ghap {

/// splitmix64 finalizer. Bijective on 64-bit words, so distinct inputs can
/// never collide.
constexpr std::uint64_t mix64(std::uint64_t x) {
    x ^= x >> 30;
    x *= 0xBF58476D1CE4E5B9ULL;
    x ^= x >> 27;
    x *= 0x94D049BB133111EBULL;
    x ^= x >> 31;
    return x;
}

/// Derives the per-block reducer seed from the pipeline seed. Stable across
/// platforms and runs; blocks with distinct indices always get distinct seeds.
constexpr std::uint64_t hash_block_seed(std::uint64_t seed, std::uint64_t block_index) {
    return mix64(seed + 0x9E3779B97F4A7C15ULL * (block_index + 1));
}

/// Small deterministic generator (splitmix64 stream). All distributions are
/// implemented by hand on top of the raw stream so that results are identical
/// across standard libraries and platforms.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        state_ += 0x9E3779B97F4A7C15ULL;
        return mix64(state_);
    }

    /// Uniform double in [0, 1), 53 bits of precision.
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    /// Uniform in [lo, hi).
    double next_in(double lo, double hi) {
        return lo + (hi - lo) * next_double();
    }

    /// Uniform integer in [0, n). Rejection sampling keeps it unbiased.
    std::uint64_t next_below(std::uint64_t n) {
        if (n <= 1) {
            return 0;
        }
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t x;
        do {
            x = next_u64();
        } while (x >= limit);
        return x % n;
    }

    /// Standard normal via Box-Muller; the second value of each pair is cached.
    double next_normal();

private:
    std::uint64_t state_;
    double cached_normal_ = 0.0;
    bool has_cached_ = false;
};

} // namespace ghap
