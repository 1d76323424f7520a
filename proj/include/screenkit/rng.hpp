#pragma once

#include <cstdint>
#include <random>

namespace screenkit {

// Draws derived from mt19937_64 without std::uniform_*_distribution, whose
// output is implementation-defined. Equal seeds give equal streams on every
// standard library.

// Uniform integer in [0, bound), bound >= 1. Rejection sampling, no modulo bias.
inline std::uint64_t bounded_u64(std::mt19937_64& gen, std::uint64_t bound) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    std::uint64_t v = gen();
    while (v >= limit) v = gen();
    return v % bound;
}

// Uniform double in [0, 1) with 53 random bits.
inline double unit_double(std::mt19937_64& gen) {
    return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

}  // namespace screenkit
