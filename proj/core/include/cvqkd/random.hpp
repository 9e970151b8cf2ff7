#pragma once

#include <cmath>
#include <cstdint>

namespace cvqkd {

// Counter-seeded generator: every (seed, stream) pair yields an independent,
// platform-stable sequence. Each protocol shot owns its own substream, so the
// results do not depend on how shots are scheduled across workers.
//
// The core step is the splitmix64 finalizer; normals come from a hand-rolled
// Box-Muller transform because std::normal_distribution is free to produce
// different sequences on different standard libraries.
class ShotRng {
 public:
  ShotRng(std::uint64_t seed, std::uint64_t stream) noexcept
      : state_(derive_state(seed, stream)) {}

  std::uint64_t next_u64() noexcept {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  // Uniform on [0, 1), 53-bit resolution.
  double uniform() noexcept {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // Standard normal draw. Box-Muller produces pairs; the second value is
  // cached so consecutive calls cost one transform per two draws.
  double normal() noexcept {
    if (has_cached_) {
      has_cached_ = false;
      return cached_;
    }
    // u1 in (0, 1] keeps the log finite.
    const double u1 = (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
    const double u2 = uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 6.283185307179586476925286766559 * u2;
    cached_ = radius * std::sin(angle);
    has_cached_ = true;
    return radius * std::cos(angle);
  }

  double normal(double mean, double stddev) noexcept {
    return mean + stddev * normal();
  }

 private:
  static std::uint64_t derive_state(std::uint64_t seed, std::uint64_t stream) noexcept {
    // Two finalizer rounds over the combined words give well-separated
    // starting states for adjacent stream indices.
    std::uint64_t z = seed ^ (stream * 0xD2B74407B1CE6E93ull + 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    z ^= z >> 31;
    z = (z + seed) * 0xBF58476D1CE4E5B9ull;
    return z ^ (z >> 29);
  }

  std::uint64_t state_;
  double cached_ = 0.0;
  bool has_cached_ = false;
};

}  // namespace cvqkd
