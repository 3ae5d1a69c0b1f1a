#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace becnet {

/// Counter-based seed derivation (splitmix64 finalizer). Stream k of a base
/// seed is mix(base + k*GOLDEN), so ensemble members get independent streams
/// without sequential state.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
    std::uint64_t z = base + (stream + 1) * 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

/// Deterministic RNG wrapper. All draws are implemented explicitly on top of
/// the mt19937_64 bit stream so output is identical across platforms
/// (std::uniform_real_distribution et al. are implementation-defined).
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t bits() { return engine_(); }

    /// Uniform double in [0, 1).
    double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    /// Uniform double in (0, 1]; never returns 0 (safe for log()).
    double uniform01_open_low() { return 1.0 - uniform01(); }

    /// Uniform integer in [0, n). Rejection sampling, unbiased.
    std::uint64_t below(std::uint64_t n) {
        const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
        std::uint64_t x;
        do {
            x = engine_();
        } while (x >= limit);
        return x % n;
    }

    /// Standard normal via Marsaglia polar method (no cached second value, so
    /// the draw count per call is a pure function of the bit stream).
    double gaussian() {
        double u, v, r2;
        do {
            u = 2.0 * uniform01() - 1.0;
            v = 2.0 * uniform01() - 1.0;
            r2 = u * u + v * v;
        } while (r2 >= 1.0 || r2 == 0.0);
        return u * std::sqrt(-2.0 * std::log(r2) / r2);
    }

private:
    std::mt19937_64 engine_;
};

} // namespace becnet
