#pragma once

#include <cstdint>
#include <random>

namespace bellmem {

/// splitmix64 finalizer; used to derive independent stream seeds.
std::uint64_t mix64(std::uint64_t x);

/// Seed for item `index` of a family rooted at `master`. Counter-based, so
/// any item's seed is computable without touching the others.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index);

/// Injected randomness. All draws are defined in terms of raw 64-bit engine
/// output, so a given seed yields the same sequence on every platform.
class RandomSource {
 public:
  explicit RandomSource(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }
  bool coin() { return (engine_() >> 63) != 0; }
  /// Uniform on [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  bool bernoulli(double p) { return uniform01() < p; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace bellmem
