#pragma once

#include <array>
#include <cstdint>
#include <vector>

namespace daa {

/// Seeded pseudo-random source: xoshiro256** (Blackman & Vigna) whose
/// 256-bit state is filled from the 64-bit seed by four splitmix64 steps.
///
/// All derived variates are built from integer draws with explicit formulas
/// (no std::*_distribution), so a seed yields the same sequence on every
/// platform. Not thread-safe; give each thread its own source via
/// derive_seed().
class RandomSource {
 public:
  explicit RandomSource(std::uint64_t seed);

  std::uint64_t seed() const noexcept { return seed_; }

  std::uint64_t next_u64() noexcept;
  /// Uniform in [0, 1) with 53 random bits.
  double uniform() noexcept;
  /// Uniform in (0, 1); safe to take the logarithm of.
  double uniform_open() noexcept;
  /// Uniform integer in [0, bound).
  std::uint64_t below(std::uint64_t bound) noexcept;
  /// Standard normal via Box-Muller (one variate per call, two uniforms consumed).
  double normal() noexcept;
  /// Gamma(shape, 1) via Marsaglia-Tsang; shape < 1 uses the U^(1/shape) boost.
  double gamma(double shape);

  template <typename T>
  void shuffle(std::vector<T>& v) noexcept {
    for (std::size_t i = v.size(); i > 1; --i) {
      const auto j = static_cast<std::size_t>(below(i));
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  std::uint64_t seed_;
  std::array<std::uint64_t, 4> s_{};
};

/// One splitmix64 output for `x`.
std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// Child seed for an independent stream: splitmix64(base ^ splitmix64(stream)).
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) noexcept;

}  // namespace daa
