#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace circaug {

using Rng = std::mt19937_64;

/// 64-bit FNV-1a; used for stream derivation and config hashing.
constexpr std::uint64_t fnv1a(std::string_view text, std::uint64_t hash = 0xcbf29ce484222325ULL) {
    for (unsigned char c : text) {
        hash ^= c;
        hash *= 0x100000001b3ULL;
    }
    return hash;
}

/// Named sub-stream of a root seed ("data", "init", "shuffle", "latent", ...).
/// Streams with different names are independent of each other.
inline Rng make_stream(std::uint64_t root_seed, std::string_view name) {
    const std::uint64_t h = fnv1a(name, 0xcbf29ce484222325ULL ^ (root_seed * 0x9e3779b97f4a7c15ULL));
    std::seed_seq seq{static_cast<std::uint32_t>(root_seed), static_cast<std::uint32_t>(root_seed >> 32),
                      static_cast<std::uint32_t>(h), static_cast<std::uint32_t>(h >> 32)};
    return Rng(seq);
}

inline double standard_normal(Rng& rng) { return std::normal_distribution<double>(0.0, 1.0)(rng); }

inline double uniform(Rng& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

}  // namespace circaug
