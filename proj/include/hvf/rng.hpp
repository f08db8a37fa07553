#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace hvf {

// splitmix64: cheap stateless mixer, used to derive independent child seeds.
inline uint64_t splitmix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

inline uint64_t mix_seed(uint64_t a, uint64_t b) {
  return splitmix64(a ^ splitmix64(b + 0x9e3779b97f4a7c15ull));
}

// Deterministic across platforms: mt19937_64 output is fixed by the standard
// and every variate below uses an explicit transform, never the
// implementation-defined std distributions.
class Rng {
 public:
  explicit Rng(uint64_t seed) : engine_(seed) {}

  uint64_t next_u64() { return engine_(); }

  // [0, 1), 53-bit mantissa
  double uniform01() { return double(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  // Box-Muller, one variate per call (no cached pair, keeps stream layout obvious)
  double normal() {
    double u1;
    do {
      u1 = uniform01();
    } while (u1 <= 0.0);
    const double u2 = uniform01();
    constexpr double two_pi = 6.283185307179586476925286766559;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(two_pi * u2);
  }

  Rng fork(uint64_t tag) { return Rng(mix_seed(next_u64(), tag)); }

 private:
  std::mt19937_64 engine_;
};

}  // namespace hvf
