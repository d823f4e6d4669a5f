/**
 * @file snapshot.hpp
 * @brief Bit-exact binary state snapshots.
 *
 * File layout (all integers and floats little-endian):
 *   bytes 0-7    magic "MPESHELL"
 *   bytes 8-11   format version (uint32, currently 1)
 *   bytes 12-23  K, n_lat, n_lon (uint32 each)
 *   bytes 24-31  model time (IEEE-754 binary64)
 *   payload      4 * K * n_lat * n_lon binary64 values: the fields
 *                v_theta, v_phi, T, q in that order, each level-major
 *                (slowest index level, then latitude ring, then longitude).
 *
 * The header alone determines the payload length, so truncation is detected
 * before any field is constructed; a failed read never yields a partial
 * state. Version or magic mismatches are rejected with the values seen.
 * Writing then reading reproduces the state bit for bit.
 */
#ifndef MPE_SNAPSHOT_HPP
#define MPE_SNAPSHOT_HPP

#include <cstdint>
#include <string>

#include "mpe/dynamics.hpp"

namespace mpe {

struct SnapshotHeader {
    std::uint32_t version = 1;
    std::uint32_t K = 0, n_lat = 0, n_lon = 0;
    double time = 0.0;

    /// Payload size in bytes implied by the dimensions.
    std::uint64_t payload_bytes() const;
};

/// Writes U to path, replacing any existing file. Throws std::runtime_error
/// on I/O failure.
void write_snapshot(const std::string& path, const State& U);

/// Header only (reads 32 bytes). Throws std::runtime_error on bad files.
SnapshotHeader read_snapshot_header(const std::string& path);

/// Full state. Throws std::runtime_error on magic/version mismatch, size
/// mismatch against the header, or short reads.
State read_snapshot(const std::string& path);

} // namespace mpe

#endif
