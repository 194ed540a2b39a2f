#pragma once

#include <cstdint>
#include <vector>

namespace jetlab {

// splitmix64: the documented generator behind every seeded sample point in
// the verify/analyze commands and the test suites.
struct SplitMix64 {
  std::uint64_t state;

  explicit SplitMix64(std::uint64_t seed) : state(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  std::vector<double> uniform_box(const std::vector<double>& lo,
                                  const std::vector<double>& hi) {
    std::vector<double> v(lo.size());
    for (std::size_t i = 0; i < lo.size(); ++i) v[i] = uniform(lo[i], hi[i]);
    return v;
  }
};

}  // namespace jetlab
