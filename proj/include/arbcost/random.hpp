#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace arbcost {

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9E3779B97F4A7C15ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

/// Counter-based stream keyed by (seed, path index). The k-th draw of a path
/// is a pure function of (seed, path, k), so paths can be evaluated in any
/// order or on any worker and still reproduce bit-for-bit.
class PathStream {
 public:
  PathStream(std::uint64_t seed, std::uint64_t path) noexcept
      : key_(mix64(seed ^ mix64(path ^ 0xD1B54A32D192ED03ull))) {}

  std::uint64_t next_u64() noexcept { return mix64(key_ + 0x9E3779B97F4A7C15ull * (++counter_)); }

  /// Uniform on the open interval (0, 1).
  double uniform() noexcept { return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53; }

  /// Standard normal by Box–Muller; the second variate of each pair is cached.
  double normal() noexcept {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = uniform();
    const double u2 = uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
  }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace arbcost
