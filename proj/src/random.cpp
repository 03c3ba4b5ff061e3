#include "seedbank/random.hpp"

#include <cmath>
#include <stdexcept>

namespace seedbank {

namespace {

constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t splitmix_next(std::uint64_t& x) {
  x += kGolden;
  return mix64(x);
}

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

}  // namespace

RandomSource::RandomSource(std::uint64_t seed) : seed_(seed) {
  std::uint64_t x = seed;
  for (auto& w : state_) w = splitmix_next(x);
}

std::uint64_t RandomSource::next_u64() {
  const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
  const std::uint64_t t = state_[1] << 17;
  state_[2] ^= state_[0];
  state_[3] ^= state_[1];
  state_[1] ^= state_[2];
  state_[0] ^= state_[3];
  state_[2] ^= t;
  state_[3] = rotl(state_[3], 45);
  return result;
}

double RandomSource::uniform() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double RandomSource::exponential(double rate) {
  if (!(rate > 0.0)) throw std::invalid_argument("exponential: rate must be > 0");
  // uniform() < 1, so the argument of log1p stays in (-1, 0].
  return -std::log1p(-uniform()) / rate;
}

bool RandomSource::bernoulli(double p) { return uniform() < p; }

std::uint64_t RandomSource::uniform_index(std::uint64_t n) {
  if (n == 0) throw std::invalid_argument("uniform_index: n must be >= 1");
  auto idx = static_cast<std::uint64_t>(uniform() * static_cast<double>(n));
  return idx >= n ? n - 1 : idx;
}

void RandomSource::uniform_distinct_pair(std::uint64_t n, std::uint64_t& i,
                                         std::uint64_t& j) {
  if (n < 2) throw std::invalid_argument("uniform_distinct_pair: n must be >= 2");
  i = uniform_index(n);
  j = uniform_index(n - 1);
  if (j >= i) ++j;
  if (i > j) std::swap(i, j);
}

RandomSource RandomSource::substream(std::string_view tag, std::uint64_t a,
                                     std::uint64_t b) const {
  std::uint64_t h = seed_;
  h = mix64(h ^ fnv1a(tag));
  h = mix64(h ^ (a + kGolden));
  h = mix64(h ^ (b + 0x7f4a7c159e3779b9ULL));
  return RandomSource(h);
}

}  // namespace seedbank
