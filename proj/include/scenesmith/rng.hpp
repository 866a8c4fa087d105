#pragma once

#include <cstdint>
#include <string_view>

namespace scenesmith {

/// SplitMix64 finalizer.
std::uint64_t mix64(std::uint64_t x) noexcept;

/// Seed of the i-th child of `base`. Children are independent of each other and of
/// the order in which they are requested.
std::uint64_t split_seed(std::uint64_t base, std::uint64_t index) noexcept;

/// Counter-based generator: draw n is mix64(key + n * gamma). A stream is fully
/// described by (key, counter), so streams can be derived without sharing state.
///
/// All distributions are implemented here rather than through <random> so that the
/// output bytes do not depend on the standard library vendor.
class Rng {
 public:
  explicit Rng(std::uint64_t key) noexcept : key_(mix64(key)) {}

  /// Named sub-stream of `seed`. Draws made on one stream never shift another.
  static Rng stream(std::uint64_t seed, std::string_view name) noexcept;

  std::uint64_t next_u64() noexcept;
  /// Uniform on [0, 1) with 53 random bits.
  double uniform() noexcept;
  /// Uniform on [lo, hi).
  double uniform(double lo, double hi) noexcept;
  /// Uniform integer on [0, n). n must be > 0.
  std::uint64_t below(std::uint64_t n) noexcept;
  /// Uniform integer on [lo, hi] inclusive.
  std::int64_t between(std::int64_t lo, std::int64_t hi) noexcept;
  bool bernoulli(double p) noexcept;
  /// Poisson(mean) by sequential CDF inversion; mean must be finite and >= 0.
  std::uint64_t poisson(double mean) noexcept;

  std::uint64_t counter() const noexcept { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace scenesmith
