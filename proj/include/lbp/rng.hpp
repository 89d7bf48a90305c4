#pragma once

#include <cstdint>
#include <random>

namespace lbp {

using Rng = std::mt19937_64;

// SplitMix64 mixer, used to turn (seed, stream) pairs into well-spread
// engine seeds so that adjacent chain indices do not produce correlated
// mt19937_64 states.
inline std::uint64_t splitmix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ull;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

// Generator for stream `stream` of master seed `seed`. Chains within a
// setting use stream = chain index; stream 0 is reserved for model
// construction.
inline Rng make_rng(std::uint64_t seed, std::uint64_t stream = 0) {
    return Rng(splitmix64(seed + stream));
}

inline double uniform01(Rng& rng) {
    return std::uniform_real_distribution<double>(0.0, 1.0)(rng);
}

}  // namespace lbp
