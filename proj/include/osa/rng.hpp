#pragma once

#include <cstdint>
#include <random>

namespace osa {

// Mixing function used to derive independent substream seeds from one master
// seed. Distinct inputs map to well-separated outputs, so per-rollout streams
// do not share correlated low bits.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

inline std::uint64_t substream_seed(std::uint64_t master, std::uint64_t index) {
  return splitmix64(master + 0x9E3779B97F4A7C15ull * (index + 1));
}

// Stream for rollout `index` under `master`. mt19937_64 is fully specified by
// the standard, so sequences are reproducible across platforms.
inline std::mt19937_64 make_stream(std::uint64_t master, std::uint64_t index) {
  return std::mt19937_64(substream_seed(master, index));
}

// Uniform double in [0,1) built from the top 53 bits; avoids the
// implementation-defined behavior of std::uniform_real_distribution.
inline double uniform01(std::mt19937_64& g) {
  return static_cast<double>(g() >> 11) * 0x1.0p-53;
}

}  // namespace osa
