#include "isac/rng.hpp"

#include <cmath>

#include "isac/constants.hpp"

namespace isac {

namespace {
constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;
}

std::uint64_t CounterRng::next_u64() noexcept {
  ++counter_;
  return mix64(key_ + counter_ * kGolden);
}

double CounterRng::uniform() noexcept {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

__extension__ using u128 = unsigned __int128;

std::size_t CounterRng::uniform_index(std::size_t n) noexcept {
  // Lemire's nearly-divisionless rejection.
  const auto range = static_cast<std::uint64_t>(n);
  auto product = static_cast<u128>(next_u64()) * range;
  auto low = static_cast<std::uint64_t>(product);
  if (low < range) {
    const std::uint64_t threshold = (0 - range) % range;
    while (low < threshold) {
      product = static_cast<u128>(next_u64()) * range;
      low = static_cast<std::uint64_t>(product);
    }
  }
  return static_cast<std::size_t>(product >> 64);
}

double CounterRng::normal() noexcept {
  // 1 - u keeps the log argument in (0, 1].
  const double u1 = 1.0 - uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(kTwoPi * u2);
}

std::complex<double> CounterRng::complex_normal(double variance) noexcept {
  const double u1 = 1.0 - uniform();
  const double u2 = uniform();
  const double radius = std::sqrt(-variance * std::log(u1));
  return std::polar(radius, kTwoPi * u2);
}

double CounterRng::exponential() noexcept { return -std::log(1.0 - uniform()); }

CounterRng CounterRng::split(std::uint64_t stream) const noexcept {
  return CounterRng(mix64(key_ ^ mix64(stream * kGolden + 0x243f6a8885a308d3ULL)));
}

}  // namespace isac
