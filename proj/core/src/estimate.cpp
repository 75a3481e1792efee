#include "isac/estimate.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "isac/constants.hpp"
#include "isac/error.hpp"

namespace isac {

namespace {

std::size_t wrap(long index, std::size_t len) noexcept {
  const auto l = static_cast<long>(len);
  return static_cast<std::size_t>(((index % l) + l) % l);
}

RMatrix power_of(const RangeDopplerMatrix& rdm) {
  RMatrix p(rdm.delay_bins(), rdm.doppler_bins());
  const auto src = rdm.values.flat();
  auto dst = p.flat();
  for (std::size_t i = 0; i < dst.size(); ++i) dst[i] = std::norm(src[i]);
  return p;
}

// Sum over the (2 half_r + 1) x (2 half_c + 1) box centred on every cell, wrapping.
RMatrix box_sum(const RMatrix& p, std::size_t half_r, std::size_t half_c) {
  const std::size_t rows = p.rows();
  const std::size_t cols = p.cols();
  RMatrix along_cols(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    const auto src = p.row(r);
    double acc = 0.0;
    for (long j = -static_cast<long>(half_c); j <= static_cast<long>(half_c); ++j) {
      acc += src[wrap(j, cols)];
    }
    for (std::size_t c = 0; c < cols; ++c) {
      along_cols(r, c) = acc;
      acc += src[wrap(static_cast<long>(c + half_c + 1), cols)];
      acc -= src[wrap(static_cast<long>(c) - static_cast<long>(half_c), cols)];
    }
  }
  RMatrix out(rows, cols);
  for (std::size_t c = 0; c < cols; ++c) {
    double acc = 0.0;
    for (long i = -static_cast<long>(half_r); i <= static_cast<long>(half_r); ++i) {
      acc += along_cols(wrap(i, rows), c);
    }
    for (std::size_t r = 0; r < rows; ++r) {
      out(r, c) = acc;
      acc += along_cols(wrap(static_cast<long>(r + half_r + 1), rows), c);
      acc -= along_cols(wrap(static_cast<long>(r) - static_cast<long>(half_r), rows), c);
    }
  }
  return out;
}

bool by_power_then_index(const Detection& a, const Detection& b) noexcept {
  if (a.peak_power != b.peak_power) return a.peak_power > b.peak_power;
  if (a.nu != b.nu) return a.nu < b.nu;
  return a.mu < b.mu;
}

constexpr double kInvPhi = 0.6180339887498948482;  // 1 / golden ratio
constexpr double kGoldenWidth = 1e-7;

// Maximizes value(x) on [lo, hi]. `slope` is d value / dx and is only used to
// sharpen the final golden-section bracket.
template <typename Value, typename Slope>
double maximize_on_interval(Value&& value, Slope&& slope, double lo, double hi) {
  double a = lo;
  double b = hi;
  double c = b - kInvPhi * (b - a);
  double d = a + kInvPhi * (b - a);
  double fc = value(c);
  double fd = value(d);
  while (b - a > kGoldenWidth) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - kInvPhi * (b - a);
      fc = value(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kInvPhi * (b - a);
      fd = value(d);
    }
  }
  double best = 0.5 * (a + b);

  // Near the optimum value(x) is flat to ~sqrt(eps); the derivative is not.
  double left = std::max(lo, a - kGoldenWidth);
  double right = std::min(hi, b + kGoldenWidth);
  double s_left = slope(left);
  double s_right = slope(right);
  if (!(s_left > 0.0 && s_right < 0.0)) return best;
  int side = 0;
  for (int iter = 0; iter < 60 && right - left > 1e-15; ++iter) {
    const double x = (left * s_right - right * s_left) / (s_right - s_left);
    const double s = slope(x);
    best = x;
    if (s == 0.0) break;
    if (s > 0.0) {
      left = x;
      s_left = s;
      if (side == 1) s_right *= 0.5;  // Illinois step
      side = 1;
    } else {
      right = x;
      s_right = s;
      if (side == -1) s_left *= 0.5;
      side = -1;
    }
  }
  return std::clamp(best, lo, hi);
}

}  // namespace

std::size_t CfarParams::training_cells() const noexcept {
  const std::size_t outer = (2 * (guard_nu + train_nu) + 1) * (2 * (guard_mu + train_mu) + 1);
  const std::size_t inner = (2 * guard_nu + 1) * (2 * guard_mu + 1);
  return outer - inner;
}

void CfarParams::validate() const {
  if (training_cells() == 0) throw InvalidParameter("CFAR training window is empty");
  if (!(false_alarm_rate > 0.0 && false_alarm_rate < 1.0)) {
    throw InvalidParameter("CFAR false-alarm rate must lie in (0, 1)");
  }
}

double cfar_threshold_factor(std::size_t training_cells, double false_alarm_rate) {
  if (training_cells == 0) throw InvalidParameter("CFAR training window is empty");
  if (!(false_alarm_rate > 0.0 && false_alarm_rate < 1.0))
    throw InvalidParameter("CFAR false-alarm rate must lie in (0, 1)");
  const auto t = static_cast<double>(training_cells);
  return t * (std::pow(false_alarm_rate, -1.0 / t) - 1.0);
}

Detection detect_max(const RangeDopplerMatrix& rdm) {
  if (rdm.values.empty()) throw InvalidParameter("detect_max on an empty matrix");
  Detection best{0, 0, rdm.power(0, 0)};
  for (std::size_t nu = 0; nu < rdm.delay_bins(); ++nu) {
    for (std::size_t mu = 0; mu < rdm.doppler_bins(); ++mu) {
      const double p = rdm.power(nu, mu);
      if (p > best.peak_power) best = {nu, mu, p};
    }
  }
  return best;
}

std::vector<Detection> detect_cfar(const RangeDopplerMatrix& rdm, const CfarParams& params) {
  params.validate();
  const std::size_t rows = rdm.delay_bins();
  const std::size_t cols = rdm.doppler_bins();
  if (2 * (params.guard_nu + params.train_nu) + 1 > rows ||
      2 * (params.guard_mu + params.train_mu) + 1 > cols) {
    throw InvalidParameter("CFAR window is larger than the range-Doppler matrix");
  }
  const RMatrix p = power_of(rdm);
  const RMatrix outer = box_sum(p, params.guard_nu + params.train_nu,
                                params.guard_mu + params.train_mu);
  const RMatrix inner = box_sum(p, params.guard_nu, params.guard_mu);
  const std::size_t t = params.training_cells();
  const double alpha = cfar_threshold_factor(t, params.false_alarm_rate);

  std::vector<Detection> hits;
  for (std::size_t nu = 0; nu < rows; ++nu) {
    for (std::size_t mu = 0; mu < cols; ++mu) {
      // Guard against tiny negative sums from the sliding-window cancellation.
      const double training = std::max(0.0, outer(nu, mu) - inner(nu, mu));
      const double threshold = alpha * training / static_cast<double>(t);
      const double cell = p(nu, mu);
      if (cell > threshold && cell > 0.0) hits.push_back({nu, mu, cell});
    }
  }
  std::sort(hits.begin(), hits.end(), by_power_then_index);
  return hits;
}

std::vector<Detection> cluster_peaks(const std::vector<Detection>& detections,
                                     std::size_t delay_bins, std::size_t doppler_bins) {
  Matrix<int> label(delay_bins, doppler_bins, -1);
  for (std::size_t i = 0; i < detections.size(); ++i) {
    label(detections[i].nu, detections[i].mu) = static_cast<int>(i);
  }
  std::vector<bool> visited(detections.size(), false);
  std::vector<Detection> peaks;
  std::vector<std::size_t> stack;
  for (std::size_t seed = 0; seed < detections.size(); ++seed) {
    if (visited[seed]) continue;
    Detection best = detections[seed];
    visited[seed] = true;
    stack.assign(1, seed);
    while (!stack.empty()) {
      const Detection cur = detections[stack.back()];
      stack.pop_back();
      if (by_power_then_index(cur, best)) best = cur;
      for (long dn = -1; dn <= 1; ++dn) {
        for (long dm = -1; dm <= 1; ++dm) {
          const int l = label(wrap(static_cast<long>(cur.nu) + dn, delay_bins),
                              wrap(static_cast<long>(cur.mu) + dm, doppler_bins));
          if (l >= 0 && !visited[static_cast<std::size_t>(l)]) {
            visited[static_cast<std::size_t>(l)] = true;
            stack.push_back(static_cast<std::size_t>(l));
          }
        }
      }
    }
    peaks.push_back(best);
  }
  std::sort(peaks.begin(), peaks.end(), by_power_then_index);
  return peaks;
}

std::vector<Detection> strongest_peaks(const RangeDopplerMatrix& rdm, std::size_t count) {
  const RMatrix p = power_of(rdm);
  const std::size_t rows = p.rows();
  const std::size_t cols = p.cols();
  std::vector<Detection> maxima;
  std::vector<Detection> others;
  for (std::size_t nu = 0; nu < rows; ++nu) {
    for (std::size_t mu = 0; mu < cols; ++mu) {
      const double v = p(nu, mu);
      bool dominant = v > 0.0;
      for (long dn = -1; dn <= 1 && dominant; ++dn) {
        for (long dm = -1; dm <= 1 && dominant; ++dm) {
          if (dn == 0 && dm == 0) continue;
          const double w = p(wrap(static_cast<long>(nu) + dn, rows),
                             wrap(static_cast<long>(mu) + dm, cols));
          if (w > v) dominant = false;
        }
      }
      (dominant ? maxima : others).push_back({nu, mu, v});
    }
  }
  std::sort(maxima.begin(), maxima.end(), by_power_then_index);
  if (maxima.size() > count) {
    maxima.resize(count);
  } else if (maxima.size() < count) {
    const std::size_t missing = std::min(count - maxima.size(), others.size());
    std::partial_sort(others.begin(), others.begin() + static_cast<long>(missing), others.end(),
                      by_power_then_index);
    maxima.insert(maxima.end(), others.begin(), others.begin() + static_cast<long>(missing));
  }
  return maxima;
}

TargetEstimate refine_peak(const CMatrix& h_hat, const Detection& det, const FrameConfig& cfg,
                           const RefineOptions& options) {
  if (det.nu >= h_hat.rows() || det.mu >= h_hat.cols()) {
    throw InvalidParameter("detection lies outside the range-Doppler matrix");
  }
  const auto nu0 = static_cast<double>(det.nu);
  const auto mu0 = static_cast<double>(det.mu);
  double nu = nu0;
  double mu = mu0;

  TargetEstimate est;
  est.source = det;
  est.converged = false;
  for (std::size_t sweep = 1; sweep <= options.max_sweeps; ++sweep) {
    const DelayCut along_delay(h_hat, mu);
    const double nu_next = maximize_on_interval(
        [&](double x) { return std::norm(along_delay(x)); },
        [&](double x) { return 2.0 * std::real(std::conj(along_delay(x)) * along_delay.derivative(x)); },
        nu0 - 0.5, nu0 + 0.5);
    const DopplerCut along_doppler(h_hat, nu_next);
    const double mu_next = maximize_on_interval(
        [&](double x) { return std::norm(along_doppler(x)); },
        [&](double x) {
          return 2.0 * std::real(std::conj(along_doppler(x)) * along_doppler.derivative(x));
        },
        mu0 - 0.5, mu0 + 0.5);
    const bool settled = std::abs(nu_next - nu) < options.tolerance_bins &&
                         std::abs(mu_next - mu) < options.tolerance_bins;
    nu = nu_next;
    mu = mu_next;
    est.sweeps = sweep;
    // The first sweep starts from the integer bin, so it cannot confirm convergence.
    if (settled && sweep > 1) {
      est.converged = true;
      break;
    }
  }
  est.refined_nu = nu;
  est.refined_mu = mu;
  est.amplitude = dtft_point(h_hat, nu, mu);
  const auto phys = to_physical(nu, mu, cfg);
  est.distance_m = phys.distance_m;
  est.velocity_mps = phys.velocity_mps;
  return est;
}

PhysicalPoint to_physical(double nu, double mu, const FrameConfig& cfg) noexcept {
  const auto n = static_cast<double>(cfg.n_subcarriers);
  const auto m = static_cast<double>(cfg.n_symbols);
  const double mu_signed = mu > m / 2.0 ? mu - m : mu;
  const double delay = nu / (n * cfg.subcarrier_spacing_hz);
  const double doppler = mu_signed / (m * cfg.symbol_duration());
  return {kSpeedOfLight * delay / 2.0, doppler * kSpeedOfLight / (2.0 * cfg.carrier_frequency_hz)};
}

BinPoint to_bins(double distance_m, double velocity_mps, const FrameConfig& cfg) noexcept {
  const auto n = static_cast<double>(cfg.n_subcarriers);
  const auto m = static_cast<double>(cfg.n_symbols);
  const double delay = 2.0 * distance_m / kSpeedOfLight;
  const double doppler = 2.0 * velocity_mps * cfg.carrier_frequency_hz / kSpeedOfLight;
  return {delay * n * cfg.subcarrier_spacing_hz, doppler * m * cfg.symbol_duration()};
}

CrbVariances crb(const FrameConfig& cfg, double snr_target) {
  cfg.validate();
  if (!(snr_target > 0.0) || !std::isfinite(snr_target)) {
    throw InvalidParameter("per-target SNR must be positive and finite");
  }
  const auto n = static_cast<double>(cfg.n_subcarriers);
  const auto m = static_cast<double>(cfg.n_symbols);
  const double four_pi = 4.0 * std::numbers::pi;
  const double d_scale = kSpeedOfLight / (four_pi * cfg.subcarrier_spacing_hz);
  const double v_scale =
      kSpeedOfLight / (four_pi * cfg.symbol_duration() * cfg.carrier_frequency_hz);
  return {6.0 / ((n * n - 1.0) * n * m * snr_target) * d_scale * d_scale,
          6.0 / ((m * m - 1.0) * n * m * snr_target) * v_scale * v_scale};
}

}  // namespace isac
