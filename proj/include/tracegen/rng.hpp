#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace tracegen {

// splitmix64 finalizer. Used to derive independent stream seeds from a base
// seed and to build fixed lookup tables that must never change between
// releases (the stub featurizer depends on them).
inline uint64_t splitmix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline uint64_t derive_seed(uint64_t base, uint64_t stream) {
  return splitmix64(base ^ splitmix64(stream + 0x6a09e667f3bcc909ULL));
}

// Deterministic RNG used everywhere randomness is needed. The engine is
// std::mt19937_64 (bit-exact output mandated by the standard); the floating
// point draws are written out by hand because std::*_distribution is
// implementation-defined and would break byte-identical reproducibility.
class Rng {
 public:
  explicit Rng(uint64_t seed) : engine_(seed) {}

  uint64_t next_u64() { return engine_(); }

  // Uniform in [0, 1), 53-bit mantissa.
  double uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Unbiased enough for index picking; bias is < n / 2^64.
  uint64_t uniform_index(uint64_t n) {
    return static_cast<uint64_t>((static_cast<__uint128_t>(next_u64()) * n) >> 64);
  }

  bool bernoulli(double p) { return uniform() < p; }

  // Standard normal via Box-Muller with a cached spare.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    // u1 in (0, 1] so the log never sees zero.
    double u1 = static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
    double u2 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    double theta = 2.0 * M_PI * u2;
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
  }

  double normal(double mean, double stddev) { return mean + stddev * normal(); }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace tracegen
