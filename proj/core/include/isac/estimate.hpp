#pragma once

#include <cstddef>
#include <vector>

#include "isac/frame.hpp"
#include "isac/matrix.hpp"
#include "isac/rdm.hpp"

namespace isac {

struct Detection {
  std::size_t nu = 0;  // delay bin
  std::size_t mu = 0;  // Doppler bin
  double peak_power = 0.0;

  bool operator==(const Detection&) const = default;
};

struct TargetEstimate {
  double distance_m = 0.0;
  double velocity_mps = 0.0;
  cdouble amplitude{};  // complex gain a e^{j phi}
  double refined_nu = 0.0;
  double refined_mu = 0.0;
  Detection source;
  bool converged = true;
  std::size_t sweeps = 0;
};

/// 2D cell-averaging CFAR window; counts are per side of the cell under test.
struct CfarParams {
  std::size_t guard_nu = 2;
  std::size_t guard_mu = 2;
  std::size_t train_nu = 8;
  std::size_t train_mu = 8;
  double false_alarm_rate = 1e-4;

  /// Number of training cells T.
  std::size_t training_cells() const noexcept;
  void validate() const;

  bool operator==(const CfarParams&) const = default;
};

/// alpha = T (P_FA^{-1/T} - 1): exact for exponentially distributed cell powers.
double cfar_threshold_factor(std::size_t training_cells, double false_alarm_rate);

/// Bin of maximal |P|^2; ties go to the smallest nu, then the smallest mu.
Detection detect_max(const RangeDopplerMatrix& rdm);

/// Every cell whose power exceeds alpha times the mean training-cell power,
/// with toroidal wrap at the edges; sorted by descending power.
/// Throws InvalidParameter if the window does not fit in the matrix.
std::vector<Detection> detect_cfar(const RangeDopplerMatrix& rdm, const CfarParams& params);

/// Groups 8-connected (toroidal) detections and returns the strongest cell of
/// each group, by descending power.
std::vector<Detection> cluster_peaks(const std::vector<Detection>& detections,
                                     std::size_t delay_bins, std::size_t doppler_bins);

/// Up to `count` bins that dominate their 8 toroidal neighbours, strongest
/// first. Topped up with the strongest remaining bins when there are too few
/// local maxima.
std::vector<Detection> strongest_peaks(const RangeDopplerMatrix& rdm, std::size_t count);

struct RefineOptions {
  double tolerance_bins = 1e-4;  // per-axis change that ends the sweeps
  std::size_t max_sweeps = 50;
};

/// Maximizes |dtft_point| over det +- 0.5 bins by alternating golden-section
/// line searches (delay, then Doppler). The line optimum is polished by
/// regula falsi on the analytic derivative of |dtft|^2 inside the final
/// golden-section bracket. The amplitude is the periodogram at the optimum.
TargetEstimate refine_peak(const CMatrix& h_hat, const Detection& det, const FrameConfig& cfg,
                           const RefineOptions& options = {});
inline TargetEstimate refine_peak(const ChannelEstimate& h_hat, const Detection& det,
                                  const FrameConfig& cfg, const RefineOptions& options = {}) {
  return refine_peak(h_hat.values, det, cfg, options);
}

struct PhysicalPoint {
  double distance_m = 0.0;
  double velocity_mps = 0.0;
};

struct BinPoint {
  double nu = 0.0;
  double mu = 0.0;
};

/// Doppler bins above M/2 are read as negative Doppler.
PhysicalPoint to_physical(double nu, double mu, const FrameConfig& cfg) noexcept;
/// Inverse of to_physical for unwrapped bins: nu = tau N df, mu = fD M T_S.
BinPoint to_bins(double distance_m, double velocity_mps, const FrameConfig& cfg) noexcept;

struct CrbVariances {
  double distance_m2 = 0.0;
  double velocity_m2s2 = 0.0;
};

/// Cramer-Rao bounds on distance and velocity for a target with linear
/// per-target SNR |a|^2 / sigma_W^2. Throws InvalidParameter unless snr > 0.
CrbVariances crb(const FrameConfig& cfg, double snr_target);

}  // namespace isac
