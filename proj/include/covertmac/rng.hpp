#pragma once

// Deterministic per-item random streams: each work item i under master seed s
// gets an independent engine seeded by splitmix64 mixing of (s, i), so
// results do not depend on scheduling order or worker count.

#include <cstdint>
#include <random>

namespace covertmac {

inline uint64_t splitmix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::mt19937_64 stream_rng(uint64_t seed, uint64_t index) {
  return std::mt19937_64(splitmix64(splitmix64(seed) ^ splitmix64(index + 1)));
}

}  // namespace covertmac
