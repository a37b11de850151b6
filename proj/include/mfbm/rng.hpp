#pragma once
#include <cstdint>
#include <random>

namespace mfbm {

// Splittable seeding: a master seed is mixed with (replica, mode, tag)
// through splitmix64 so every substream is reproducible and independent of
// scheduling. Identical (seed, replica, mode, tag) always yields the same
// engine state, which is what makes serial and OpenMP runs agree bit for bit.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Stream tags keep the noise sources disjoint: the scalar fBM driving a mode
// never shares a stream with the Wiener noise of the same replica.
enum class StreamTag : std::uint64_t {
    fbm     = 0x66626d00ULL,
    wiener  = 0x77696e00ULL,
    probe   = 0x70726200ULL,
    event   = 0x65767400ULL,
};

inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t replica,
                                 std::uint64_t mode, StreamTag tag) {
    std::uint64_t s = splitmix64(master ^ 0xa0761d6478bd642fULL);
    s = splitmix64(s ^ (replica + 0x8000000000000000ULL));
    s = splitmix64(s ^ (mode << 20));
    s = splitmix64(s ^ static_cast<std::uint64_t>(tag));
    return s;
}

inline std::mt19937_64 make_engine(std::uint64_t master, std::uint64_t replica,
                                   std::uint64_t mode, StreamTag tag) {
    return std::mt19937_64(derive_seed(master, replica, mode, tag));
}

// human-readable tag for manifests and log lines
const char* stream_tag_name(StreamTag tag);

} // namespace mfbm
