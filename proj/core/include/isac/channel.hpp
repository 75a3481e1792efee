#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "isac/frame.hpp"
#include "isac/matrix.hpp"
#include "isac/rng.hpp"

namespace isac {

struct TargetTruth {
  double distance_m = 0.0;
  double velocity_mps = 0.0;
  double rcs_weight = 1.0;

  bool operator==(const TargetTruth&) const = default;
};

/// One propagation path of the sensing channel.
struct Reflection {
  double amplitude = 0.0;  // linear, >= 0
  double delay_s = 0.0;
  double doppler_hz = 0.0;
  double phase_rad = 0.0;  // [0, 2 pi)
};

/// Frequency-domain channel H (N x M).
struct ChannelMatrix {
  CMatrix values;
};

/// Y = X o H + W together with the noise variance that produced W.
struct ReceiveFrame {
  CMatrix values;
  double noise_variance = 0.0;
};

/// Parametric diffuse-scattering cluster around each specular return.
struct ScatteringParams {
  bool enabled = false;
  double diffuse_fraction = 0.9;  // rho: share of the power reflected diffusely
  std::size_t n_rays = 8;         // K_s
  double extent_m = 8.0;          // target extent; spreads delays over 2 E / c0
  double doppler_jitter_hz = 0.0;

  /// Default parameters for a frame: jitter of 0.02 Doppler bins.
  static ScatteringParams defaults_for(const FrameConfig& cfg) noexcept;
  /// Throws InvalidParameter on rho outside [0, 1], K_s == 0 while enabled, or
  /// negative extent / jitter.
  void validate() const;

  bool operator==(const ScatteringParams&) const = default;
};

/// Reflections of a scene with the noise variance that calibrates it.
struct CalibratedReflections {
  std::vector<Reflection> reflections;
  double noise_variance = 0.0;
};

double delay_of_distance(double distance_m) noexcept;
double doppler_of_velocity(double velocity_mps, double carrier_frequency_hz) noexcept;

/// Throws ScenarioInfeasible (naming `index`) when the round-trip delay does not
/// fit in the cyclic prefix or the Doppler shift is not below df / 10.
void check_target_feasible(const TargetTruth& target, const FrameConfig& cfg, std::size_t index);

/// One specular reflection per target with amplitude proportional to
/// rcs_weight / d^2 and a uniform random phase. The total power sum |a|^2 is 1
/// and the returned noise variance is 10^(-snr_y_db / 10).
CalibratedReflections reflections_from_targets(std::span<const TargetTruth> targets,
                                               const FrameConfig& cfg, double snr_y_db,
                                               CounterRng& rng);

/// Specular ray with power (1 - rho) a^2 followed by K_s diffuse rays sharing
/// rho a^2 by a flat Dirichlet split. With rho == 0 only the input ray is returned.
std::vector<Reflection> expand_scattering(const Reflection& specular,
                                          const ScatteringParams& params, CounterRng& rng);

/// H(n, m) = sum_l a_l exp(-j 2 pi df tau_l n) exp(+j 2 pi T_S fD_l m) exp(j phi_l)
ChannelMatrix synthesize_channel(const FrameConfig& cfg, std::span<const Reflection> reflections);

/// Y = X o H + W with W ~ CN(0, noise_variance).
ReceiveFrame apply_channel(const SymbolFrame& frame, const ChannelMatrix& channel,
                           double noise_variance, CounterRng& rng);

/// Noiseless receive frame computed in the time domain: per-symbol IDFT, cyclic
/// prefix insertion, an integer-sample delay with gain a e^{j phi}, prefix
/// removal and DFT. Direct O(N^2) transforms; intended as a reference for
/// synthesize_channel. Throws OracleDomainError unless 0 <= delay <= N_cp.
ReceiveFrame time_domain_oracle(const SymbolFrame& frame, const FrameConfig& cfg,
                                long delay_samples, double amplitude, double phase_rad);

}  // namespace isac
