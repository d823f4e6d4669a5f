/**
 * @file snapshot.cpp
 * @brief Binary snapshot reader/writer.
 */
#include "mpe/snapshot.hpp"

#include <bit>
#include <cstdio>
#include <cstring>
#include <limits>
#include <memory>
#include <stdexcept>

namespace mpe {

namespace {

// The on-disk format is little-endian binary64; this build writes host
// representations directly, which is only correct on little-endian IEEE
// hosts.
static_assert(std::endian::native == std::endian::little,
              "snapshot I/O assumes a little-endian host");
static_assert(sizeof(double) == 8 && std::numeric_limits<double>::is_iec559,
              "snapshot I/O assumes IEEE-754 binary64");

constexpr char k_magic[8] = {'M', 'P', 'E', 'S', 'H', 'E', 'L', 'L'};
constexpr std::uint32_t k_version = 1;
constexpr std::size_t k_header_bytes = 32;

struct FileCloser {
    void operator()(std::FILE* f) const {
        if (f) std::fclose(f);
    }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

[[noreturn]] void fail(const std::string& path, const std::string& msg) {
    throw std::runtime_error("snapshot '" + path + "': " + msg);
}

void put_u32(unsigned char* p, std::uint32_t v) { std::memcpy(p, &v, 4); }
std::uint32_t get_u32(const unsigned char* p) {
    std::uint32_t v;
    std::memcpy(&v, p, 4);
    return v;
}

SnapshotHeader parse_header(const std::string& path, const unsigned char (&h)[k_header_bytes]) {
    if (std::memcmp(h, k_magic, sizeof k_magic) != 0)
        fail(path, "bad magic (not a snapshot file)");
    SnapshotHeader out;
    out.version = get_u32(h + 8);
    if (out.version != k_version)
        fail(path, "unsupported format version " + std::to_string(out.version) + " (expected " +
                       std::to_string(k_version) + ")");
    out.K = get_u32(h + 12);
    out.n_lat = get_u32(h + 16);
    out.n_lon = get_u32(h + 20);
    std::memcpy(&out.time, h + 24, 8);
    if (out.K == 0 || out.n_lat == 0 || out.n_lon == 0) fail(path, "zero dimension in header");
    return out;
}

} // namespace

std::uint64_t SnapshotHeader::payload_bytes() const {
    return 4ull * K * n_lat * n_lon * sizeof(double);
}

void write_snapshot(const std::string& path, const State& U) {
    const int K = U.T.K, n_lat = U.T.n_lat, n_lon = U.T.n_lon;
    FilePtr f(std::fopen(path.c_str(), "wb"));
    if (!f) fail(path, "cannot open for writing");

    unsigned char h[k_header_bytes];
    std::memcpy(h, k_magic, sizeof k_magic);
    put_u32(h + 8, k_version);
    put_u32(h + 12, std::uint32_t(K));
    put_u32(h + 16, std::uint32_t(n_lat));
    put_u32(h + 20, std::uint32_t(n_lon));
    std::memcpy(h + 24, &U.time, 8);
    if (std::fwrite(h, 1, k_header_bytes, f.get()) != k_header_bytes)
        fail(path, "short write (header)");

    for (const std::vector<double>* field : {&U.v.vth.v, &U.v.vph.v, &U.T.v, &U.q.v})
        if (std::fwrite(field->data(), sizeof(double), field->size(), f.get()) != field->size())
            fail(path, "short write (payload)");
    if (std::fflush(f.get()) != 0) fail(path, "flush failed");
}

SnapshotHeader read_snapshot_header(const std::string& path) {
    FilePtr f(std::fopen(path.c_str(), "rb"));
    if (!f) fail(path, "cannot open for reading");
    unsigned char h[k_header_bytes];
    if (std::fread(h, 1, k_header_bytes, f.get()) != k_header_bytes)
        fail(path, "truncated header");
    return parse_header(path, h);
}

State read_snapshot(const std::string& path) {
    FilePtr f(std::fopen(path.c_str(), "rb"));
    if (!f) fail(path, "cannot open for reading");
    unsigned char h[k_header_bytes];
    if (std::fread(h, 1, k_header_bytes, f.get()) != k_header_bytes)
        fail(path, "truncated header");
    const SnapshotHeader hd = parse_header(path, h);

    // Verify the full payload is present before touching any field, so a
    // truncated file cannot produce a partially filled state.
    if (std::fseek(f.get(), 0, SEEK_END) != 0) fail(path, "seek failed");
    const long size = std::ftell(f.get());
    if (size < 0) fail(path, "tell failed");
    const std::uint64_t expected = k_header_bytes + hd.payload_bytes();
    if (std::uint64_t(size) != expected)
        fail(path, "payload length mismatch: file has " + std::to_string(size) + " bytes, header implies " +
                       std::to_string(expected));
    if (std::fseek(f.get(), long(k_header_bytes), SEEK_SET) != 0) fail(path, "seek failed");

    State U(int(hd.K), int(hd.n_lat), int(hd.n_lon));
    U.time = hd.time;
    for (std::vector<double>* field : {&U.v.vth.v, &U.v.vph.v, &U.T.v, &U.q.v})
        if (std::fread(field->data(), sizeof(double), field->size(), f.get()) != field->size())
            fail(path, "short read (payload)");
    return U;
}

} // namespace mpe
