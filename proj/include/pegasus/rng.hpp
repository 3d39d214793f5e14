#pragma once

#include <cstdint>
#include <numeric>
#include <random>
#include <string_view>
#include <vector>

namespace pegasus {

// All randomness in the engine flows from one root seed through named
// substreams, so a single --seed flag reproduces a whole run.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t substream_seed(std::uint64_t root, std::string_view name,
                                    std::uint64_t index = 0) {
    std::uint64_t h = root;
    for (char c : name) h = splitmix64(h ^ static_cast<std::uint64_t>(static_cast<unsigned char>(c)));
    return splitmix64(h ^ index);
}

inline std::mt19937_64 make_rng(std::uint64_t root, std::string_view name,
                                std::uint64_t index = 0) {
    return std::mt19937_64(substream_seed(root, name, index));
}

// Seeded Fisher-Yates permutation of {0,...,n-1}; perm[v] is the rank of v.
inline std::vector<std::uint32_t> random_permutation(std::uint32_t n, std::mt19937_64& rng) {
    std::vector<std::uint32_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0u);
    for (std::uint32_t i = n; i > 1; --i) {
        std::uniform_int_distribution<std::uint32_t> dist(0, i - 1);
        std::swap(perm[i - 1], perm[dist(rng)]);
    }
    return perm;
}

}  // namespace pegasus
