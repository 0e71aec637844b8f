#pragma once

#include <cstdint>
#include <random>

namespace pce {

/// Derives the seed of substream `r` from a master seed.
///
/// Substreams are defined by the splitmix64 finalizer applied to
/// master + (r + 1) * 0x9E3779B97F4A7C15, so replicate r's stream depends
/// only on (master, r) and never on execution order or thread count.
inline std::uint64_t substream_seed(std::uint64_t master, std::uint64_t r) {
  std::uint64_t z = master + (r + 1) * 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

using Rng = std::mt19937_64;

inline Rng make_rng(std::uint64_t master, std::uint64_t r) {
  return Rng(substream_seed(master, r));
}

}  // namespace pce
