// SPDX-License-Identifier: Apache-2.0
//
// msisac: multi-static OFDM sensing simulator
// Portable seeded random numbers.
//
// The engine is std::mt19937_64, whose output sequence is fixed by the
// standard. The standard distributions are not, so the uniform/normal draws
// below are written out explicitly; identical seeds give identical bits on
// every conforming platform.
//
// Seed splitting: derive_seed(parent, tag...) folds each tag into the parent
// through splitmix64. Independent streams (masks, pilots, noise, per-trial
// seeds) use distinct tags, so adding a stream never shifts another one.

#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <random>

#include "msisac/common.hpp"

namespace msisac {

inline constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept
{
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

inline constexpr std::uint64_t derive_seed(std::uint64_t parent) noexcept { return splitmix64(parent); }

template <typename... Tags>
constexpr std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t tag, Tags... rest) noexcept
{
    return derive_seed(splitmix64(parent ^ splitmix64(tag + 0x632BE59BD9B4E019ULL)), static_cast<std::uint64_t>(rest)...);
}

/// Stream tags used across the library.
namespace stream {
inline constexpr std::uint64_t stations = 1;
inline constexpr std::uint64_t scatterers = 2;
inline constexpr std::uint64_t path_phase = 3;
inline constexpr std::uint64_t masks = 4;
inline constexpr std::uint64_t pilots = 5;
inline constexpr std::uint64_t noise = 6;
inline constexpr std::uint64_t trial = 7;
} // namespace stream

class Rng {
  public:
    explicit Rng(std::uint64_t seed) : engine_(splitmix64(seed)) {}

    std::uint64_t bits() { return engine_(); }

    /// Uniform on [0, 1) with 53 random bits.
    double uniform()
    {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Unbiased integer on [0, n) by rejection.
    std::uint64_t uniform_int(std::uint64_t n)
    {
        if (n <= 1)
            return 0;
        const std::uint64_t max = std::numeric_limits<std::uint64_t>::max();
        const std::uint64_t limit = max - (max % n + 1) % n;
        std::uint64_t x;
        do {
            x = engine_();
        } while (x > limit);
        return x % n;
    }

    bool bernoulli(double p) { return uniform() < p; }

    /// Standard normal via Box-Muller; the second variate is cached.
    double normal()
    {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u1 = uniform();
        while (u1 <= 0.0)
            u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        spare_ = r * std::sin(two_pi * u2);
        has_spare_ = true;
        return r * std::cos(two_pi * u2);
    }

    /// Circularly-symmetric complex Gaussian with E|z|^2 = variance.
    cdouble complex_normal(double variance)
    {
        const double s = std::sqrt(variance / 2.0);
        const double re = normal();
        const double im = normal();
        return {s * re, s * im};
    }

  private:
    std::mt19937_64 engine_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

} // namespace msisac
