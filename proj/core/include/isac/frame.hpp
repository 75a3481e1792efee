#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "isac/matrix.hpp"
#include "isac/rng.hpp"

namespace isac {

enum class AlphabetKind { Qpsk, Qam16, Qam64, Custom };

std::string_view to_string(AlphabetKind kind) noexcept;
/// Parses "qpsk" | "qam16" | "qam64" | "custom"; throws InvalidParameter otherwise.
AlphabetKind parse_alphabet_kind(std::string_view text);

/// Equiprobable constellation with unit average power and zero mean.
struct ModulationAlphabet {
  AlphabetKind kind = AlphabetKind::Qpsk;
  /// For square QAM, points[label] is the Gray-mapped symbol of bit label `label`.
  std::vector<cdouble> points;

  std::size_t size() const noexcept { return points.size(); }
};

/// Gray-mapped QPSK / square QAM alphabet. Custom alphabets go through
/// make_custom_alphabet.
ModulationAlphabet make_alphabet(AlphabetKind kind);

/// Removes the mean and scales to unit average power.
/// Throws InvalidAlphabet on an empty list, non-finite points, or a list whose
/// points all coincide (nothing left after centering).
ModulationAlphabet make_custom_alphabet(std::span<const cdouble> points);

/// (1/|X|) sum |x|^2.
double mean_power(std::span<const cdouble> points) noexcept;
cdouble mean_value(std::span<const cdouble> points) noexcept;

/// Fourth moment (1/|X|) sum |x|^4 of a unit-power alphabet.
/// Throws InvalidParameter if the average power is not 1 (tolerance 1e-9).
double kurtosis(std::span<const cdouble> points);
double kurtosis(const ModulationAlphabet& alphabet);

struct FrameConfig {
  std::size_t n_subcarriers = 256;
  std::size_t n_symbols = 64;
  double subcarrier_spacing_hz = 30e3;
  std::size_t cp_samples = 18;
  double carrier_frequency_hz = 3.5e9;

  /// T_S = (N + N_cp) / (N * df), including the cyclic prefix.
  double symbol_duration() const noexcept;
  /// c0 / (2 N df)
  double range_resolution() const noexcept;
  /// c0 / (2 fc M T_S)
  double velocity_resolution() const noexcept;

  /// Throws InvalidParameter unless N, M >= 2 and all rates are positive and finite.
  void validate() const;

  bool operator==(const FrameConfig&) const = default;
};

/// N x M transmit matrix drawn from `alphabet`.
struct SymbolFrame {
  CMatrix symbols;
  ModulationAlphabet alphabet;
  /// Stream state of the generator at the time of the draw.
  std::uint64_t seed_key = 0;
  std::uint64_t seed_counter = 0;

  std::size_t n_subcarriers() const noexcept { return symbols.rows(); }
  std::size_t n_symbols() const noexcept { return symbols.cols(); }
};

/// i.i.d. uniform draws from the alphabet; a pure function of (cfg, alphabet, rng state).
SymbolFrame draw_frame(const FrameConfig& cfg, const ModulationAlphabet& alphabet,
                       CounterRng& rng);

}  // namespace isac
