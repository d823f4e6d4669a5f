/**
 * @file rng.cpp
 * @brief Named stream derivation: FNV-1a name hash mixed through splitmix64.
 */
#include "mpe/rng.hpp"

namespace mpe {

std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

std::mt19937_64 named_stream(std::uint64_t seed, std::string_view name) {
    std::uint64_t state = seed ^ fnv1a64(name);
    std::uint64_t a = splitmix64(state);
    std::uint64_t b = splitmix64(state);
    std::seed_seq seq{std::uint32_t(a), std::uint32_t(a >> 32), std::uint32_t(b),
                      std::uint32_t(b >> 32)};
    return std::mt19937_64(seq);
}

} // namespace mpe
