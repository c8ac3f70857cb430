#pragma once

#include <cstdint>

namespace fastloc {

/// SplitMix64 output finalizer; a bijective avalanche mix on 64 bits.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Counter-based stream: the value at `counter` depends only on (key, counter),
/// so any site or instance can be generated independently of the others.
constexpr std::uint64_t keyed_bits(std::uint64_t key, std::uint64_t counter) {
  return mix64(mix64(key) ^ mix64(counter + 0x632be59bd9b4e019ULL));
}

/// Uniform double in [0,1) with 53 random bits.
constexpr double keyed_uniform(std::uint64_t key, std::uint64_t counter) {
  return static_cast<double>(keyed_bits(key, counter) >> 11) * 0x1.0p-53;
}

/// Seed of instance `index` in a batch rooted at `base`.
constexpr std::uint64_t instance_seed(std::uint64_t base, std::uint64_t index) {
  return mix64(base ^ mix64(index));
}

}  // namespace fastloc
