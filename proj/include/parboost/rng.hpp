#pragma once

#include <cstdint>
#include <random>

namespace parboost {

// splitmix64 finalizer; used both as a generator seeder and as a mixing step
// when deriving independent streams from (seed, indices...).
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Deterministic stream of uniform variates. Conversions are done by hand so
// draws are identical across standard library implementations; results must
// not depend on how tasks are scheduled, only on the derivation indices.
class RngStream {
public:
  explicit RngStream(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform in [0, 1) with 53 random bits.
  double next_double() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  // Uniform in {0, ..., bound-1} via rejection (unbiased).
  std::uint64_t next_below(std::uint64_t bound) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    std::uint64_t x;
    do {
      x = engine_();
    } while (x >= limit);
    return x % bound;
  }

  bool next_bernoulli(double p) { return next_double() < p; }

  int next_sign() { return (engine_() >> 63) ? 1 : -1; }

private:
  std::mt19937_64 engine_;
};

// Derives the seed of an independent substream from a root seed and up to
// four indices. Each index is absorbed through a splitmix64 round, so streams
// for distinct (a, b, c, d) are decorrelated.
inline std::uint64_t derive_seed(std::uint64_t root, std::uint64_t a = 0,
                                 std::uint64_t b = 0, std::uint64_t c = 0,
                                 std::uint64_t d = 0) {
  std::uint64_t s = root;
  std::uint64_t h = splitmix64(s);
  for (std::uint64_t idx : {a, b, c, d}) {
    s = h ^ (idx + 0x9e3779b97f4a7c15ULL);
    h = splitmix64(s);
  }
  return h;
}

inline RngStream derive_stream(std::uint64_t root, std::uint64_t a = 0,
                               std::uint64_t b = 0, std::uint64_t c = 0,
                               std::uint64_t d = 0) {
  return RngStream(derive_seed(root, a, b, c, d));
}

} // namespace parboost
