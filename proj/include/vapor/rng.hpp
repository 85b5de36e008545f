#pragma once

#include <cstdint>
#include <random>

namespace vapor {

// Fixed seed-derivation scheme: master seed -> per-seed stream -> per-episode
// substream. Rerunning a single seed reproduces its slice of a full run.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t mix_keys(std::uint64_t a, std::uint64_t b) {
    return splitmix64(a ^ splitmix64(b + 0x632be59bd9b4e019ULL));
}

inline std::mt19937_64 make_rng(std::uint64_t key) { return std::mt19937_64(splitmix64(key)); }

inline std::mt19937_64 make_rng(std::uint64_t master, std::uint64_t stream) {
    return make_rng(mix_keys(master, stream));
}

inline std::mt19937_64 make_rng(std::uint64_t master, std::uint64_t stream, std::uint64_t sub) {
    return make_rng(mix_keys(mix_keys(master, stream), sub));
}

}  // namespace vapor
