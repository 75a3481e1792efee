#include "isac/frame.hpp"

#include <cmath>
#include <string>

#include "isac/constants.hpp"
#include "isac/error.hpp"

namespace isac {

namespace {

unsigned gray_decode(unsigned g) noexcept {
  unsigned b = 0;
  for (; g != 0; g >>= 1) b ^= g;
  return b;
}

// Square QAM with bits_per_axis bits on each of I and Q. The upper half of the
// label selects the in-phase level, the lower half the quadrature level; both
// are Gray-coded so that neighbouring levels differ in one bit.
std::vector<cdouble> square_qam(unsigned bits_per_axis) {
  const unsigned levels = 1u << bits_per_axis;
  const unsigned count = levels * levels;
  std::vector<cdouble> points;
  points.reserve(count);
  for (unsigned label = 0; label < count; ++label) {
    const unsigned i_bits = label >> bits_per_axis;
    const unsigned q_bits = label & (levels - 1);
    const double re = 2.0 * gray_decode(i_bits) - (levels - 1.0);
    const double im = 2.0 * gray_decode(q_bits) - (levels - 1.0);
    points.emplace_back(re, im);
  }
  // Average energy of a square M-QAM on odd integers is 2 (M - 1) / 3.
  const double scale = 1.0 / std::sqrt(2.0 * (count - 1.0) / 3.0);
  for (auto& p : points) p *= scale;
  return points;
}

}  // namespace

std::string_view to_string(AlphabetKind kind) noexcept {
  switch (kind) {
    case AlphabetKind::Qpsk: return "qpsk";
    case AlphabetKind::Qam16: return "qam16";
    case AlphabetKind::Qam64: return "qam64";
    case AlphabetKind::Custom: return "custom";
  }
  return "unknown";
}

AlphabetKind parse_alphabet_kind(std::string_view text) {
  if (text == "qpsk") return AlphabetKind::Qpsk;
  if (text == "qam16") return AlphabetKind::Qam16;
  if (text == "qam64") return AlphabetKind::Qam64;
  if (text == "custom") return AlphabetKind::Custom;
  throw InvalidParameter("unknown alphabet kind '" + std::string(text) + "'");
}

ModulationAlphabet make_alphabet(AlphabetKind kind) {
  switch (kind) {
    case AlphabetKind::Qpsk: return {kind, square_qam(1)};
    case AlphabetKind::Qam16: return {kind, square_qam(2)};
    case AlphabetKind::Qam64: return {kind, square_qam(3)};
    case AlphabetKind::Custom: break;
  }
  throw InvalidAlphabet("custom alphabets need a point list; use make_custom_alphabet");
}

ModulationAlphabet make_custom_alphabet(std::span<const cdouble> points) {
  if (points.empty()) throw InvalidAlphabet("custom alphabet is empty");
  for (const auto& p : points) {
    if (!std::isfinite(p.real()) || !std::isfinite(p.imag())) {
      throw InvalidAlphabet("custom alphabet contains a non-finite point");
    }
  }
  const cdouble mean = mean_value(points);
  std::vector<cdouble> centered(points.begin(), points.end());
  for (auto& p : centered) p -= mean;
  const double power = mean_power(centered);
  if (!(power > 0.0)) throw InvalidAlphabet("custom alphabet has zero power after centering");
  const double scale = 1.0 / std::sqrt(power);
  for (auto& p : centered) p *= scale;
  return {AlphabetKind::Custom, std::move(centered)};
}

double mean_power(std::span<const cdouble> points) noexcept {
  double acc = 0.0;
  for (const auto& p : points) acc += std::norm(p);
  return points.empty() ? 0.0 : acc / static_cast<double>(points.size());
}

cdouble mean_value(std::span<const cdouble> points) noexcept {
  cdouble acc{};
  for (const auto& p : points) acc += p;
  return points.empty() ? acc : acc / static_cast<double>(points.size());
}

double kurtosis(std::span<const cdouble> points) {
  if (points.empty()) throw InvalidParameter("kurtosis of an empty alphabet");
  if (std::abs(mean_power(points) - 1.0) > 1e-9) {
    throw InvalidParameter("kurtosis requires a unit-power alphabet");
  }
  // m4 / m2^2 equals m4 at unit power and is exactly 1 for constant modulus.
  double m2 = 0.0;
  double m4 = 0.0;
  for (const auto& p : points) {
    const double e = std::norm(p);
    m2 += e;
    m4 += e * e;
  }
  const auto n = static_cast<double>(points.size());
  return (m4 / n) / ((m2 / n) * (m2 / n));
}

double kurtosis(const ModulationAlphabet& alphabet) { return kurtosis(alphabet.points); }

double FrameConfig::symbol_duration() const noexcept {
  const auto n = static_cast<double>(n_subcarriers);
  return (n + static_cast<double>(cp_samples)) / (n * subcarrier_spacing_hz);
}

double FrameConfig::range_resolution() const noexcept {
  return kSpeedOfLight / (2.0 * static_cast<double>(n_subcarriers) * subcarrier_spacing_hz);
}

double FrameConfig::velocity_resolution() const noexcept {
  return kSpeedOfLight /
         (2.0 * carrier_frequency_hz * static_cast<double>(n_symbols) * symbol_duration());
}

void FrameConfig::validate() const {
  if (n_subcarriers < 2) throw InvalidParameter("n_subcarriers must be >= 2");
  if (n_symbols < 2) throw InvalidParameter("n_symbols must be >= 2");
  if (!(subcarrier_spacing_hz > 0.0) || !std::isfinite(subcarrier_spacing_hz)) {
    throw InvalidParameter("subcarrier_spacing_hz must be positive");
  }
  if (!(carrier_frequency_hz > 0.0) || !std::isfinite(carrier_frequency_hz)) {
    throw InvalidParameter("carrier_frequency_hz must be positive");
  }
}

SymbolFrame draw_frame(const FrameConfig& cfg, const ModulationAlphabet& alphabet,
                       CounterRng& rng) {
  cfg.validate();
  if (alphabet.points.empty()) throw InvalidAlphabet("alphabet is empty");
  SymbolFrame frame{CMatrix(cfg.n_subcarriers, cfg.n_symbols), alphabet, rng.key(),
                    rng.counter()};
  for (auto& x : frame.symbols.flat()) x = alphabet.points[rng.uniform_index(alphabet.size())];
  return frame;
}

}  // namespace isac
