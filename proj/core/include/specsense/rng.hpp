#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>
#include <type_traits>

namespace specsense {

// splitmix64 step; used both as a seed scrambler and as a cheap hash combiner.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Order-sensitive combiner for deriving per-trial seeds from a master seed.
// Every trial of every cell gets an independent stream, so aggregation order
// and thread scheduling cannot change results.
class SeedChain {
public:
    explicit SeedChain(std::uint64_t master) : state_(splitmix64(master ^ 0x5851f42d4c957f2dULL)) {}

    SeedChain& mix(std::uint64_t v) {
        state_ = splitmix64(state_ ^ v);
        return *this;
    }

    // Signed values hash as their sign-extended two's-complement image.
    template <typename T>
        requires(std::is_integral_v<T> && !std::is_same_v<T, std::uint64_t>)
    SeedChain& mix(T v) {
        return mix(static_cast<std::uint64_t>(static_cast<std::int64_t>(v)));
    }

    SeedChain& mix(double v) {
        // Canonicalize -0.0 so equal values hash equally.
        if (v == 0.0) v = 0.0;
        return mix(std::bit_cast<std::uint64_t>(v));
    }

    SeedChain& mix(std::string_view s) {
        std::uint64_t h = 0xcbf29ce484222325ULL;
        for (unsigned char c : s) {
            h ^= c;
            h *= 0x100000001b3ULL;
        }
        return mix(h);
    }

    std::uint64_t value() const { return state_; }

private:
    std::uint64_t state_;
};

// Deterministic RNG. mt19937_64 output is pinned bit-for-bit by the standard,
// and the Gaussian sampler is hand-rolled (polar method) because
// std::normal_distribution's sequence is implementation-defined.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(splitmix64(seed)) {}

    std::uint64_t next_u64() { return engine_(); }

    // Uniform in [0, 1) with 53-bit resolution.
    double uniform01() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    // Uniform integer in [0, n).
    std::uint64_t uniform_int(std::uint64_t n) {
        // Rejection sampling to avoid modulo bias.
        const std::uint64_t limit = std::uint64_t(-1) - std::uint64_t(-1) % n;
        std::uint64_t v;
        do {
            v = engine_();
        } while (v >= limit);
        return v % n;
    }

    // Standard normal via Marsaglia's polar method.
    double gaussian() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u, v, s;
        do {
            u = 2.0 * uniform01() - 1.0;
            v = 2.0 * uniform01() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        const double m = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v * m;
        have_spare_ = true;
        return u * m;
    }

private:
    std::mt19937_64 engine_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

} // namespace specsense
