#pragma once

#include <cstdint>
#include <random>

namespace zicure {

// Deterministic uniform source. mt19937_64 supplies the bits and the
// double mapping is spelled out here (top 53 bits over 2^53) so that a
// given seed produces the same stream on every platform, independent of
// how the standard library implements its distribution adaptors.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Uniform on [0, 1).
  double uniform01() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  // Uniform on [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  bool bernoulli(double p) { return uniform01() < p; }

  std::uint64_t next_u64() { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

}  // namespace zicure
