#pragma once

#include <cstdint>

namespace spinbath {

// splitmix64: small, fast, and identical on every platform, unlike the
// distributions in <random>. All reproducibility-sensitive sampling
// (Debye draws, Lanczos starts, moment probes) goes through this.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  // uniform in [0, 1), 53-bit resolution
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  // uniform in (0, 1]
  double uniform_open0() { return 1.0 - uniform(); }

  // uniform in [-1, 1)
  double symmetric() { return 2.0 * uniform() - 1.0; }

 private:
  std::uint64_t state_;
};

// Decorrelates derived streams (per-probe, per-trajectory seeds).
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  SplitMix64 g(seed ^ (0x632be59bd9b4e019ull * (stream + 1)));
  return g.next();
}

}  // namespace spinbath
