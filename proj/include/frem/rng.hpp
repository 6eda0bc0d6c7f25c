#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace frem {

// Counter-based pseudo-random generator (SplitMix64 output function applied
// to seed + counter * golden gamma). Every draw is a pure function of
// (seed, counter), so streams are reproducible across platforms and can be
// split by deriving fresh seeds.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : seed_(seed) {}

  // Independent stream for a sub-task (per replication, per layer, ...).
  [[nodiscard]] Rng derive(std::uint64_t stream) const {
    return Rng(mix(seed_ ^ mix(stream + 0x6a09e667f3bcc909ULL)));
  }

  std::uint64_t next_u64() {
    std::uint64_t x = seed_ + (++counter_) * 0x9e3779b97f4a7c15ULL;
    return mix(x);
  }

  // Uniform on (0, 1]; never returns 0 so it is safe inside log().
  double uniform_pos() {
    return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
  }

  // Uniform on [0, 1).
  double uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // Standard normal via Box-Muller; the paired draw is cached.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = uniform_pos();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
  }

  // Uniform integer in [0, bound) by rejection, bias-free.
  std::uint64_t below(std::uint64_t bound) {
    const std::uint64_t threshold = -bound % bound;
    for (;;) {
      const std::uint64_t r = next_u64();
      if (r >= threshold) return r % bound;
    }
  }

 private:
  static std::uint64_t mix(std::uint64_t x) {
    x ^= x >> 30;
    x *= 0xbf58476d1ce4e5b9ULL;
    x ^= x >> 27;
    x *= 0x94d049bb133111ebULL;
    x ^= x >> 31;
    return x;
  }

  std::uint64_t seed_;
  std::uint64_t counter_ = 0;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace frem
