#pragma once

#include <cstdint>
#include <random>

namespace subembed {

using Engine = std::mt19937_64;

// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Counter-based child seed. derive(s, i) depends only on (s, i), so any
// sub-range of a stream can be regenerated without replaying the rest.
constexpr std::uint64_t derive(std::uint64_t seed, std::uint64_t index) noexcept {
    return mix64(mix64(seed) ^ mix64(index ^ 0xd1b54a32d192ed03ULL));
}

// Domain tags for the independent streams consumed by the harness.
namespace stream {
inline constexpr std::uint64_t family = 0x46414d494c59ULL;
inline constexpr std::uint64_t matrix = 0x4d4154524958ULL;
inline constexpr std::uint64_t probe = 0x50524f4245ULL;
inline constexpr std::uint64_t width = 0x5749445448ULL;
inline constexpr std::uint64_t points = 0x504f494e5453ULL;
}  // namespace stream

// Seeds are already mixed by derive(), so direct scalar seeding is enough.
inline Engine make_engine(std::uint64_t seed) { return Engine(mix64(seed)); }

}  // namespace subembed
