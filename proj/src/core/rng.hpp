#pragma once

#include <cstdint>

namespace rmp {

// Counter-based splittable generator.  Every Monte Carlo path owns an
// independent stream derived from (seed, stream kind, path index), so results
// are bitwise identical for any worker count or execution order.
struct SplitMix64 {
  uint64_t state;

  uint64_t next() {
    uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  // uniform in [0, 1)
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
};

enum class Stream : uint64_t {
  SimulatePath = 1,
  TiltedPath = 2,
  Conditions = 3,
  GaugeProbe = 4,
};

inline uint64_t mix_seed(uint64_t seed, uint64_t kind, uint64_t index) {
  SplitMix64 g{seed ^ (0xD1B54A32D192ED03ULL * (kind + 1))};
  uint64_t a = g.next();
  g.state = a ^ (0x8CB92BA72F3D8DD7ULL * index + 0x2545F4914F6CDD1DULL);
  g.next();
  return g.state;
}

inline SplitMix64 path_rng(uint64_t seed, Stream kind, uint64_t index) {
  return SplitMix64{mix_seed(seed, static_cast<uint64_t>(kind), index)};
}

}  // namespace rmp
