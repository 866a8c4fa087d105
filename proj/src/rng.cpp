#include "scenesmith/rng.hpp"

#include <cmath>

namespace scenesmith {

namespace {
constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ULL;

std::uint64_t fnv1a(std::string_view s) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}
}  // namespace

std::uint64_t mix64(std::uint64_t x) noexcept {
  x ^= x >> 30;
  x *= 0xbf58476d1ce4e5b9ULL;
  x ^= x >> 27;
  x *= 0x94d049bb133111ebULL;
  x ^= x >> 31;
  return x;
}

std::uint64_t split_seed(std::uint64_t base, std::uint64_t index) noexcept {
  return mix64(mix64(base) ^ mix64(index * kGamma + 0x632be59bd9b4e019ULL));
}

Rng Rng::stream(std::uint64_t seed, std::string_view name) noexcept {
  return Rng(mix64(seed) ^ fnv1a(name));
}

std::uint64_t Rng::next_u64() noexcept {
  ++counter_;
  return mix64(key_ + counter_ * kGamma);
}

double Rng::uniform() noexcept {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Rng::uniform(double lo, double hi) noexcept {
  return lo + (hi - lo) * uniform();
}

std::uint64_t Rng::below(std::uint64_t n) noexcept {
  // Rejection on the top of the range keeps the draw unbiased.
  const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
  std::uint64_t x = next_u64();
  while (x >= limit) x = next_u64();
  return x % n;
}

std::int64_t Rng::between(std::int64_t lo, std::int64_t hi) noexcept {
  return lo + static_cast<std::int64_t>(below(static_cast<std::uint64_t>(hi - lo) + 1));
}

bool Rng::bernoulli(double p) noexcept { return uniform() < p; }

std::uint64_t Rng::poisson(double mean) noexcept {
  if (!(mean > 0.0)) return 0;
  // exp(-mean) underflows for large means; Poisson is closed under addition.
  constexpr double kChunk = 30.0;
  std::uint64_t total = 0;
  while (mean > kChunk) {
    total += poisson(kChunk);
    mean -= kChunk;
  }
  const double u = uniform();
  double p = std::exp(-mean);
  double cdf = p;
  std::uint64_t k = 0;
  while (u >= cdf && k < 1000) {
    ++k;
    p *= mean / static_cast<double>(k);
    cdf += p;
  }
  return total + k;
}

}  // namespace scenesmith
