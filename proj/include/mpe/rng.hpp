/**
 * @file rng.hpp
 * @brief Deterministic named random streams.
 *
 * Every stochastic ingredient of a run (initial state, ensemble
 * perturbations, test fields) draws from a stream identified by the run seed
 * plus a string name, so independent ingredients never share state and runs
 * reproduce bit-for-bit regardless of the order streams are created in.
 */
#ifndef MPE_RNG_HPP
#define MPE_RNG_HPP

#include <cstdint>
#include <random>
#include <string_view>

namespace mpe {

/// FNV-1a 64-bit hash of a string.
std::uint64_t fnv1a64(std::string_view s);

/// One step of the splitmix64 generator/finalizer.
std::uint64_t splitmix64(std::uint64_t& state);

/// Engine seeded from (seed, name); distinct names give independent streams.
std::mt19937_64 named_stream(std::uint64_t seed, std::string_view name);

} // namespace mpe

#endif
