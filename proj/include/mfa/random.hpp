#pragma once

#include <cstdint>
#include <random>

namespace mfa {

using Rng = std::mt19937_64;

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Seed of stream `index` under `master`; depends on nothing else.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) noexcept {
  return mix64(mix64(master) ^ mix64(index + 0x632be59bd9b4e019ULL));
}

/// Named sub-streams so that, e.g., shuffles and surrogates of one master seed
/// never share generator state.
enum class Stream : std::uint64_t {
  shuffle = 1,
  iaaft = 2,
  reference = 3,
  band = 4,
  synth = 5,
};

constexpr std::uint64_t stream_seed(std::uint64_t master, Stream stream) noexcept {
  return derive_seed(master, 0xff00000000000000ULL | static_cast<std::uint64_t>(stream));
}

}  // namespace mfa
