#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace cdzsl {

/// Deterministic random stream. Uses mt19937_64 with hand-rolled uniform and
/// Box-Muller normal conversion so the value sequence does not depend on the
/// standard library's distribution internals.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t bits() { return engine_(); }

    /// Uniform in [0, 1), 53-bit resolution.
    double uniform() { return static_cast<double>(bits() >> 11) * 0x1.0p-53; }

    /// Standard normal via Box-Muller. Two uniforms consumed per draw.
    double normal() {
        // u1 in (0,1] so the log is finite
        const double u1 = 1.0 - uniform();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) *
               std::cos(2.0 * std::numbers::pi * u2);
    }

    /// Uniform integer in [0, n). n must be positive.
    std::uint64_t below(std::uint64_t n) {
        // rejection sampling to avoid modulo bias
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t x;
        do {
            x = bits();
        } while (x >= limit);
        return x % n;
    }

private:
    std::mt19937_64 engine_;
};

/// Mixes a base seed with a stream id into an independent-looking subseed
/// (splitmix64 finalizer).
inline std::uint64_t subseed(std::uint64_t base, std::uint64_t stream) {
    std::uint64_t z = base + 0x9E3779B97F4A7C15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

}  // namespace cdzsl
