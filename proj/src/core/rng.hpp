// Copyright 2026 the spanqa authors.
// Licensed under the Apache License, Version 2.0.

#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

namespace spanqa {

// splitmix64 stream, used to expand a user seed into xoshiro state and to
// derive named substreams.
struct SplitMix64 {
  uint64_t state;

  explicit SplitMix64(uint64_t seed) : state(seed) {}

  uint64_t next() {
    uint64_t z = (state += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }
};

// xoshiro256** seeded via splitmix64. All randomness in the library flows
// through this generator so runs are reproducible independent of the
// platform's <random> implementation.
class Rng {
 public:
  explicit Rng(uint64_t seed);

  uint64_t next_u64();

  // Uniform in [0, 1), 53-bit resolution.
  double next_double();

  double uniform(double lo, double hi);

  // Uniform integer in [0, n), n > 0. Rejection sampled.
  uint64_t next_below(uint64_t n);

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (size_t i = v.size(); i > 1; --i) {
      size_t j = static_cast<size_t>(next_below(i));
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  uint64_t s_[4];
};

uint64_t fnv1a64(std::string_view s);

// Named substream: a deterministic function of (seed, name). Every
// parameter tensor and every shuffle draws from its own stream, so adding
// or removing one consumer never perturbs the others.
Rng stream(uint64_t seed, std::string_view name);

}  // namespace spanqa
