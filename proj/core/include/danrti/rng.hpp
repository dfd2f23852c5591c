#pragma once

#include <cstdint>
#include <random>

namespace danrti {

/// splitmix64 step; used to derive independent substream seeds.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Deterministic seed for a substream identified by up to three indices.
/// Streams for distinct (a, b, c) are decorrelated regardless of call order.
inline std::uint64_t derive_seed(std::uint64_t root, std::uint64_t a, std::uint64_t b = 0,
                                 std::uint64_t c = 0) {
    std::uint64_t s = root;
    splitmix64(s);
    s ^= 0x6a09e667f3bcc909ULL + a;
    splitmix64(s);
    s ^= 0xbb67ae8584caa73bULL + b;
    splitmix64(s);
    s ^= 0x3c6ef372fe94f82bULL + c;
    return splitmix64(s);
}

inline std::mt19937_64 make_rng(std::uint64_t seed) { return std::mt19937_64(seed); }

}  // namespace danrti
