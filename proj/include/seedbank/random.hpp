#pragma once

#include <cstdint>
#include <string_view>

namespace seedbank {

// Deterministic random source (xoshiro256++ seeded via splitmix64).
//
// One master seed drives a whole experiment. Substreams are derived by
// hashing (seed, tag, a, b), so per-level and per-pair streams are
// reproducible and do not depend on how much the parent stream has been
// consumed. Identical seed + identical call sequence gives bit-identical
// draws on every platform; no libstdc++ distribution objects are used.
class RandomSource {
 public:
  explicit RandomSource(std::uint64_t seed);

  std::uint64_t seed() const { return seed_; }

  // Raw 64-bit output.
  std::uint64_t next_u64();

  // Uniform on [0, 1), 53-bit resolution.
  double uniform();

  // Exponential with the given rate (mean 1/rate). Requires rate > 0.
  double exponential(double rate);

  bool bernoulli(double p);

  // Uniform on {0, ..., n-1}. Requires n >= 1.
  std::uint64_t uniform_index(std::uint64_t n);

  // Uniform unordered pair {i, j}, 0 <= i < j < n. Requires n >= 2.
  void uniform_distinct_pair(std::uint64_t n, std::uint64_t& i, std::uint64_t& j);

  // Derived generator, independent of this stream's position.
  RandomSource substream(std::string_view tag, std::uint64_t a = 0,
                         std::uint64_t b = 0) const;

 private:
  std::uint64_t seed_;
  std::uint64_t state_[4];
};

}  // namespace seedbank
