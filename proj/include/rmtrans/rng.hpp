#pragma once

#include <cstdint>
#include <random>

namespace rmtrans {

using Rng = std::mt19937_64;

// SplitMix64 step; used only to derive well-separated child seeds.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Counter-based derivation: any (master, stream, counter) triple maps to a
// reproducible engine seed, so realization r can be replayed in isolation.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream,
                                 std::uint64_t counter = 0) {
    std::uint64_t s = master;
    (void)splitmix64(s);
    s ^= 0x632be59bd9b4e019ULL * (stream + 1);
    (void)splitmix64(s);
    s ^= 0x9e6c63d0876a9a47ULL * (counter + 1);
    return splitmix64(s);
}

inline Rng make_rng(std::uint64_t master, std::uint64_t stream, std::uint64_t counter = 0) {
    return Rng(derive_seed(master, stream, counter));
}

// Fixed stream ids for the ensemble driver and its checks.
namespace streams {
inline constexpr std::uint64_t realization = 0;   // counter = realization index
inline constexpr std::uint64_t coupling_frames = 1;  // right (transition-side) frames
inline constexpr std::uint64_t fixed_left_frames = 2;  // left frames when not resampled
inline constexpr std::uint64_t factorization = 3;
inline constexpr std::uint64_t green_center = 4;
inline constexpr std::uint64_t correlator = 5;
inline constexpr std::uint64_t probe_frame = 6;
}  // namespace streams

}  // namespace rmtrans
