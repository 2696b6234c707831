#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace gasd {

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x ^= x >> 30;
  x *= 0xbf58476d1ce4e5b9ULL;
  x ^= x >> 27;
  x *= 0x94d049bb133111ebULL;
  x ^= x >> 31;
  return x;
}

/// Counter-based random stream keyed by (seed, key). Each pixel gets its own
/// stream, so per-pixel draws do not depend on evaluation order or threads.
class KeyedStream {
 public:
  constexpr KeyedStream(std::uint64_t seed, std::uint64_t key) noexcept
      : state_(mix64(seed ^ mix64(key + kGolden))) {}

  constexpr std::uint64_t next() noexcept {
    state_ += kGolden;
    return mix64(state_);
  }

  /// Uniform in the open interval (0, 1).
  double uniform() noexcept {
    return (static_cast<double>(next() >> 11) + 0.5) * 0x1.0p-53;
  }

  /// Standard normal via Box-Muller (one variate per call, the pair's twin is
  /// discarded to keep the stream position a pure function of call count).
  double normal() noexcept {
    const double u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

 private:
  static constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;
  std::uint64_t state_;
};

/// Derives an independent seed for a named sub-purpose of a run.
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t purpose) noexcept {
  return mix64(seed + mix64(purpose ^ 0xd1b54a32d192ed03ULL));
}

}  // namespace gasd
