#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <limits>

namespace isac {

/// Counter-based SplitMix64 generator.
///
/// The i-th output of a stream with key k is mix64(k + (i + 1) * 0x9e3779b97f4a7c15),
/// so a stream is fully described by (key, counter) and independent sub-streams are
/// obtained by hashing a stream index into a new key. All distributions below are
/// implemented here (not via <random> distributions) so results are identical across
/// standard libraries.
class CounterRng {
 public:
  using result_type = std::uint64_t;

  explicit CounterRng(std::uint64_t key) noexcept : key_(key) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()() noexcept { return next_u64(); }
  std::uint64_t next_u64() noexcept;

  /// Uniform on [0, 1) with 53 bits of resolution.
  double uniform() noexcept;
  double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }
  /// Uniform integer in [0, n); n must be positive.
  std::size_t uniform_index(std::size_t n) noexcept;
  /// Standard normal via Box-Muller (consumes two outputs per call).
  double normal() noexcept;
  /// Circularly-symmetric complex Gaussian with E|z|^2 = variance.
  std::complex<double> complex_normal(double variance) noexcept;
  /// Exponential with unit mean.
  double exponential() noexcept;

  /// Independent child stream; does not advance this generator.
  [[nodiscard]] CounterRng split(std::uint64_t stream) const noexcept;

  std::uint64_t key() const noexcept { return key_; }
  std::uint64_t counter() const noexcept { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

/// Finalizer of SplitMix64 (Stafford variant 13).
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Seed of trial `index` under `master_seed`; pure function of both.
constexpr std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t index) noexcept {
  return mix64(mix64(master_seed ^ 0x6a09e667f3bcc909ULL) + mix64(index + 0x9e3779b97f4a7c15ULL));
}

}  // namespace isac
