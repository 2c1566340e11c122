#ifndef RICAV_RNG_HPP
#define RICAV_RNG_HPP

#include <cstdint>

namespace ricav {

// splitmix64. Deterministic across platforms, unlike the distributions in
// <random>, which is what makes seeded reports byte-identical.
struct Rng {
  explicit Rng(uint64_t seed) : state(seed) {}

  uint64_t next() {
    uint64_t z = (state += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  // uniform in [0, 1)
  double u01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * u01(); }

  // uniform integer in [0, n)
  uint64_t below(uint64_t n) { return next() % n; }

  uint64_t state;
};

}  // namespace ricav

#endif
