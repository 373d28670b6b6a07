#pragma once

// Deterministic random-number utilities.
//
// Every random decision in the library flows through a named substream so that
// runs are reproducible bit-for-bit across platforms: std::mt19937_64 has a
// standard-mandated output sequence, and the helpers below avoid libstdc++
// distribution objects (whose algorithms are implementation-defined).

#include <cstdint>
#include <random>
#include <string_view>

namespace lbf::rng {

// SplitMix64 step; used to whiten seeds before feeding them to mt19937_64.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// FNV-1a over a label; turns substream names into mixing constants.
inline std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

// Independent engine for (seed, label). Engines for different labels derived
// from the same seed are decorrelated, so adding a consumer of one stream
// never perturbs the draws seen by another.
inline std::mt19937_64 substream(std::uint64_t seed, std::string_view label) {
    return std::mt19937_64(splitmix64(seed ^ fnv1a(label)));
}

// Uniform double in [0, 1) with 53 random bits; portable replacement for
// std::uniform_real_distribution.
inline double uniform01(std::mt19937_64& eng) {
    return static_cast<double>(eng() >> 11) * 0x1.0p-53;
}

// Uniform double in [lo, hi).
inline double uniform_real(std::mt19937_64& eng, double lo, double hi) {
    return lo + (hi - lo) * uniform01(eng);
}

// Uniform index in [0, n). Plain modulo: the bias for n far below 2^64 is
// immeasurable here and the result is identical on every platform.
inline std::size_t uniform_index(std::mt19937_64& eng, std::size_t n) {
    return static_cast<std::size_t>(eng() % n);
}

}  // namespace lbf::rng
