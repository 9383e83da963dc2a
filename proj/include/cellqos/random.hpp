#pragma once

#include <cstdint>
#include <random>

namespace cellqos {

using Rng = std::mt19937_64;

// Independent streams keyed by (seed, stream tag, index) via splitmix64.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream,
                          std::uint64_t index = 0);

inline Rng make_rng(std::uint64_t seed, std::uint64_t stream,
                    std::uint64_t index = 0) {
  return Rng(derive_seed(seed, stream, index));
}

namespace stream {
inline constexpr std::uint64_t pattern = 0x70617474;
inline constexpr std::uint64_t shadowing = 0x73686164;
inline constexpr std::uint64_t envelope = 0x656e7665;
inline constexpr std::uint64_t queue = 0x71756575;
inline constexpr std::uint64_t origin = 0x6f726967;
inline constexpr std::uint64_t realization = 0x7265616c;
}  // namespace stream

}  // namespace cellqos
