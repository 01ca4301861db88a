#pragma once

#include <cmath>
#include <cstdint>

namespace mergecoord {

// splitmix64 step. Used for seeding and for deriving independent
// sub-streams from a single scenario seed.
inline std::uint64_t splitmix64_next(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// xoshiro256** seeded through splitmix64. The algorithm is fixed so that
// identical seeds yield identical draw sequences on every platform; trace
// determinism depends on it.
class DeterministicRng {
 public:
  explicit DeterministicRng(std::uint64_t seed) {
    std::uint64_t sm = seed;
    for (auto& word : state_) {
      word = splitmix64_next(sm);
    }
  }

  std::uint64_t next_u64() {
    const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  // Uniform in [0, 1) with 53-bit resolution.
  double next_unit() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // Box-Muller without caching the second variate: every call consumes
  // exactly two uniforms, which keeps draw alignment predictable.
  double next_gaussian(double mean, double sigma) {
    const double u1 = 1.0 - next_unit();  // (0, 1]
    const double u2 = next_unit();
    const double r = std::sqrt(-2.0 * std::log(u1));
    return mean + sigma * r * std::cos(2.0 * 3.14159265358979323846 * u2);
  }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }

  std::uint64_t state_[4];
};

// Stable stream derivation: mix a purpose tag into the scenario seed.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream_tag) {
  std::uint64_t sm = seed ^ (0x6a09e667f3bcc909ULL * (stream_tag + 1));
  return splitmix64_next(sm);
}

}  // namespace mergecoord
