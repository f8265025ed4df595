#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace cliffrb {

// All randomized operations take an explicit generator of this type.
using Rng = std::mt19937_64;

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t hash_string(std::string_view s) {
    // FNV-1a, then one splitmix round for avalanche.
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return splitmix64(h);
}

// Seed for an independent stream identified by (master, tag, a, b).
inline std::uint64_t derive_seed(std::uint64_t master, std::string_view tag, std::uint64_t a = 0,
                                 std::uint64_t b = 0) {
    std::uint64_t h = splitmix64(master);
    h = splitmix64(h ^ hash_string(tag));
    h = splitmix64(h ^ a);
    h = splitmix64(h ^ (b + 0x632be59bd9b4e019ULL));
    return h;
}

// Child generator whose stream is decorrelated from the parent.
inline Rng split(Rng& parent) { return Rng(splitmix64(parent())); }

inline bool random_bit(Rng& rng) { return (rng() >> 63) != 0; }

inline double uniform01(Rng& rng) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng); }

}  // namespace cliffrb
