#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace aoa {

using Rng = std::mt19937_64;

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Seed for stream (a, b) under `master`. Pure function of its arguments, so
/// any worker can reconstruct any stream without shared state.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b = 0) {
  return mix64(mix64(mix64(master) ^ a) ^ (b * 0xd1b54a32d192ed03ULL));
}

/// FNV-1a, used to give streams stable names ("noise", "pso", ...).
constexpr std::uint64_t stream_tag(std::string_view name) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : name) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

/// Named sub-stream of a scenario/run seed.
inline Rng make_stream(std::uint64_t seed, std::string_view name) {
  return Rng(derive_seed(seed, stream_tag(name)));
}

}  // namespace aoa
