#pragma once

#include <cmath>
#include <cstdint>

namespace frostman {

// splitmix64 finalizer: full-avalanche 64-bit mix.
constexpr inline uint64_t mix64(uint64_t z) {
  z ^= z >> 30;
  z *= 0xbf58476d1ce4e5b9ULL;
  z ^= z >> 27;
  z *= 0x94d049bb133111ebULL;
  z ^= z >> 31;
  return z;
}

constexpr uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

// Counter-based generator: one uniform 64-bit word per coordinate key, so a
// draw depends only on (master_seed, round, stage, key) and never on traversal
// or parallelization order. The per-stage part is folded into `stream` once;
// the per-key part is one or two extra mixes.
struct CounterRng {
  uint64_t stream;

  CounterRng(uint64_t master_seed, uint64_t round, uint64_t stage)
      : stream(mix64(mix64(master_seed + kGolden * round) + kGolden * stage)) {}

  uint64_t word(uint64_t k0) const { return mix64(stream ^ (k0 + kGolden)); }

  uint64_t word(const uint64_t* key, int nwords) const {
    uint64_t h = stream;
    for (int a = 0; a < nwords; ++a) h = mix64(h ^ (key[a] + kGolden * uint64_t(a + 1)));
    return h;
  }

  // P(true) = round-to-64-bits of p; exact for p a dyadic with <= 64 bits.
  static uint64_t threshold(double p) {
    if (p >= 1.0) return ~0ULL;
    if (p <= 0.0) return 0;
    return uint64_t(std::ldexp(p, 64));
  }
  bool bernoulli(uint64_t k0, uint64_t thr) const { return thr == ~0ULL || word(k0) < thr; }
  bool bernoulli(const uint64_t* key, int nwords, uint64_t thr) const {
    return thr == ~0ULL || word(key, nwords) < thr;
  }
};

}  // namespace frostman
