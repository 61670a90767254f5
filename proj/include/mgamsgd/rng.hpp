#pragma once

#include <cstdint>
#include <random>

namespace mgamsgd {

// All stochastic pieces share one generator type and these helpers instead of
// std::uniform_*_distribution, so a seed reproduces the same stream on any
// standard library.
using Rng = std::mt19937_64;

inline double uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline double uniform_symmetric(Rng& rng) { return 2.0 * uniform01(rng) - 1.0; }

inline std::size_t uniform_index(Rng& rng, std::size_t n) {
  return static_cast<std::size_t>(rng() % n);
}

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Deterministic sub-seed for a keyed child stream (worker, sweep point, rep).
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t key) {
  return splitmix64(master ^ splitmix64(key));
}

}  // namespace mgamsgd
