// Copyright 2026 The spintex Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <random>

namespace spintex::rng {

// Stream splitting: every stochastic quantity draws from its own engine whose
// seed is splitmix64-mixed from (master seed, stream tag, index...). Outputs
// therefore do not depend on the order or the number of workers.

constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t stream_seed(std::uint64_t master, std::uint64_t tag,
                                    std::uint64_t index = 0,
                                    std::uint64_t sub = 0) {
  std::uint64_t s = splitmix64(master ^ 0x5851f42d4c957f2dULL);
  s = splitmix64(s ^ tag);
  s = splitmix64(s ^ index);
  return splitmix64(s ^ sub);
}

/// Stream tags; one per consumer of randomness.
enum Tag : std::uint64_t {
  kJitter = 1,
  kShots = 2,
  kRepump = 3,
  kEchoT0 = 4,
  kOrientation = 5,
  kPhaseJitter = 6,
};

using Engine = std::mt19937_64;

inline Engine make_engine(std::uint64_t master, std::uint64_t tag,
                          std::uint64_t index = 0, std::uint64_t sub = 0) {
  return Engine(stream_seed(master, tag, index, sub));
}

/// Uniform double in [0, 1) with 53 random bits. Used instead of
/// std::uniform_real_distribution, whose output is implementation-defined.
inline double uniform01(Engine& eng) {
  return static_cast<double>(eng() >> 11) * 0x1.0p-53;
}

}  // namespace spintex::rng
