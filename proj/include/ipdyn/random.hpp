#pragma once

// Portable variate generation on top of mt19937_64. The standard
// distributions are implementation-defined, which would break byte-stable
// outputs across standard libraries.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace ipdyn::detail {

inline std::mt19937_64 make_rng(std::uint64_t seed, std::uint64_t stream) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
    return std::mt19937_64(seq);
}

/// Uniform on [0, 1) with 53 random bits.
inline double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Exponential with unit rate.
inline double standard_exponential(std::mt19937_64& rng) {
    return -std::log1p(-uniform01(rng));
}

/// Box-Muller; discards the second variate to keep the stream stateless.
inline double standard_normal(std::mt19937_64& rng) {
    const double u1 = 1.0 - uniform01(rng);  // (0, 1]
    const double u2 = uniform01(rng);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace ipdyn::detail
