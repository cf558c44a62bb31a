#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace seqmix {

// All randomness in the artifact flows from one master seed split into
// named substreams, so changing one component's draws does not perturb
// another's.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t substream_seed(std::uint64_t master, std::string_view name) {
    std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a
    for (char c : name) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    return splitmix64(master ^ h);
}

using Rng = std::mt19937_64;

inline double uniform01(Rng& rng) {
    // 53-bit mantissa draw, identical across standard library vendors
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

double sample_gamma(Rng& rng, double shape);

// Symmetric Beta(alpha, alpha) via the two-gamma construction.
double sample_beta(Rng& rng, double alpha);

}  // namespace seqmix
