#include "isac/channel.hpp"

#include <cmath>
#include <string>

#include "isac/constants.hpp"
#include "isac/error.hpp"

namespace isac {

namespace {

// exp(j 2 pi cycles) with the integer part removed first, so large arguments
// keep full precision.
cdouble unit_phasor(double cycles) noexcept {
  const double frac = cycles - std::nearbyint(cycles);
  return std::polar(1.0, kTwoPi * frac);
}

}  // namespace

ScatteringParams ScatteringParams::defaults_for(const FrameConfig& cfg) noexcept {
  ScatteringParams p;
  p.doppler_jitter_hz =
      0.02 / (cfg.symbol_duration() * static_cast<double>(cfg.n_symbols));
  return p;
}

void ScatteringParams::validate() const {
  if (!(diffuse_fraction >= 0.0 && diffuse_fraction <= 1.0)) {
    throw InvalidParameter("scattering rho must lie in [0, 1]");
  }
  if (enabled && n_rays == 0) throw InvalidParameter("scattering k_s must be >= 1");
  if (!(extent_m >= 0.0)) throw InvalidParameter("scattering extent_m must be >= 0");
  if (!(doppler_jitter_hz >= 0.0)) {
    throw InvalidParameter("scattering doppler_jitter_hz must be >= 0");
  }
}

double delay_of_distance(double distance_m) noexcept { return 2.0 * distance_m / kSpeedOfLight; }

double doppler_of_velocity(double velocity_mps, double carrier_frequency_hz) noexcept {
  return 2.0 * velocity_mps * carrier_frequency_hz / kSpeedOfLight;
}

void check_target_feasible(const TargetTruth& target, const FrameConfig& cfg, std::size_t index) {
  const std::string who = "target " + std::to_string(index);
  if (!(target.distance_m > 0.0) || !std::isfinite(target.distance_m)) {
    throw ScenarioInfeasible(who + ": distance must be positive");
  }
  if (!std::isfinite(target.velocity_mps)) throw ScenarioInfeasible(who + ": velocity not finite");
  if (!(target.rcs_weight > 0.0) || !std::isfinite(target.rcs_weight)) {
    throw ScenarioInfeasible(who + ": rcs_weight must be positive");
  }
  const double delay_samples = delay_of_distance(target.distance_m) *
                               static_cast<double>(cfg.n_subcarriers) * cfg.subcarrier_spacing_hz;
  if (!(delay_samples < static_cast<double>(cfg.cp_samples))) {
    throw ScenarioInfeasible(who + ": delay of " + std::to_string(delay_samples) +
                             " samples exceeds the cyclic prefix of " +
                             std::to_string(cfg.cp_samples));
  }
  const double doppler = doppler_of_velocity(target.velocity_mps, cfg.carrier_frequency_hz);
  if (!(std::abs(doppler) < cfg.subcarrier_spacing_hz / 10.0)) {
    throw ScenarioInfeasible(who + ": Doppler shift of " + std::to_string(doppler) +
                             " Hz violates |fD| < df/10");
  }
}

CalibratedReflections reflections_from_targets(std::span<const TargetTruth> targets,
                                               const FrameConfig& cfg, double snr_y_db,
                                               CounterRng& rng) {
  if (targets.empty()) throw InvalidParameter("scene has no targets");
  if (!std::isfinite(snr_y_db)) throw InvalidParameter("snr_y_db must be finite");
  for (std::size_t i = 0; i < targets.size(); ++i) check_target_feasible(targets[i], cfg, i);

  CalibratedReflections out;
  out.reflections.reserve(targets.size());
  double total_power = 0.0;
  for (const auto& t : targets) {
    Reflection r;
    r.amplitude = t.rcs_weight / (t.distance_m * t.distance_m);
    r.delay_s = delay_of_distance(t.distance_m);
    r.doppler_hz = doppler_of_velocity(t.velocity_mps, cfg.carrier_frequency_hz);
    r.phase_rad = kTwoPi * rng.uniform();
    total_power += r.amplitude * r.amplitude;
    out.reflections.push_back(r);
  }
  const double scale = 1.0 / std::sqrt(total_power);
  for (auto& r : out.reflections) r.amplitude *= scale;
  out.noise_variance = std::pow(10.0, -snr_y_db / 10.0);
  return out;
}

std::vector<Reflection> expand_scattering(const Reflection& specular,
                                          const ScatteringParams& params, CounterRng& rng) {
  params.validate();
  if (!params.enabled || params.diffuse_fraction == 0.0) return {specular};

  const double power = specular.amplitude * specular.amplitude;
  std::vector<Reflection> rays;
  rays.reserve(params.n_rays + 1);
  Reflection main = specular;
  main.amplitude = specular.amplitude * std::sqrt(1.0 - params.diffuse_fraction);
  rays.push_back(main);

  std::vector<double> weights(params.n_rays);
  double weight_sum = 0.0;
  for (auto& w : weights) {
    w = rng.exponential();
    weight_sum += w;
  }
  const double max_extra_delay = 2.0 * params.extent_m / kSpeedOfLight;
  for (double w : weights) {
    Reflection ray;
    ray.amplitude = std::sqrt(params.diffuse_fraction * power * w / weight_sum);
    ray.delay_s = specular.delay_s + max_extra_delay * rng.uniform();
    ray.doppler_hz = specular.doppler_hz + params.doppler_jitter_hz * rng.normal();
    ray.phase_rad = kTwoPi * rng.uniform();
    rays.push_back(ray);
  }
  return rays;
}

ChannelMatrix synthesize_channel(const FrameConfig& cfg, std::span<const Reflection> reflections) {
  cfg.validate();
  if (reflections.empty()) throw InvalidParameter("synthesize_channel needs reflections");
  const std::size_t n_sub = cfg.n_subcarriers;
  const std::size_t n_sym = cfg.n_symbols;
  const double ts = cfg.symbol_duration();

  ChannelMatrix h{CMatrix(n_sub, n_sym)};
  std::vector<cdouble> along_subcarriers(n_sub);
  std::vector<cdouble> along_symbols(n_sym);
  for (const auto& r : reflections) {
    const cdouble gain = std::polar(r.amplitude, r.phase_rad);
    const double delay_cycles = cfg.subcarrier_spacing_hz * r.delay_s;
    const double doppler_cycles = ts * r.doppler_hz;
    for (std::size_t n = 0; n < n_sub; ++n) {
      along_subcarriers[n] = gain * unit_phasor(-delay_cycles * static_cast<double>(n));
    }
    for (std::size_t m = 0; m < n_sym; ++m) {
      along_symbols[m] = unit_phasor(doppler_cycles * static_cast<double>(m));
    }
    for (std::size_t n = 0; n < n_sub; ++n) {
      auto row = h.values.row(n);
      for (std::size_t m = 0; m < n_sym; ++m) row[m] += along_subcarriers[n] * along_symbols[m];
    }
  }
  return h;
}

ReceiveFrame apply_channel(const SymbolFrame& frame, const ChannelMatrix& channel,
                           double noise_variance, CounterRng& rng) {
  if (!frame.symbols.same_shape(channel.values)) {
    throw InvalidParameter("frame and channel dimensions differ");
  }
  if (!(noise_variance >= 0.0) || !std::isfinite(noise_variance)) {
    throw InvalidParameter("noise variance must be finite and >= 0");
  }
  ReceiveFrame y{CMatrix(frame.symbols.rows(), frame.symbols.cols()), noise_variance};
  const auto x = frame.symbols.flat();
  const auto h = channel.values.flat();
  auto out = y.values.flat();
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = x[i] * h[i];
    if (noise_variance > 0.0) out[i] += rng.complex_normal(noise_variance);
  }
  return y;
}

ReceiveFrame time_domain_oracle(const SymbolFrame& frame, const FrameConfig& cfg,
                                long delay_samples, double amplitude, double phase_rad) {
  const auto n = static_cast<long>(cfg.n_subcarriers);
  const auto n_cp = static_cast<long>(cfg.cp_samples);
  const auto n_sym = cfg.n_symbols;
  if (delay_samples < 0 || delay_samples > n_cp) {
    throw OracleDomainError("oracle delay must lie in [0, N_cp]");
  }
  if (frame.symbols.rows() != cfg.n_subcarriers || frame.symbols.cols() != n_sym) {
    throw InvalidParameter("frame does not match the configuration");
  }

  // Transmit stream: [CP | IDFT(X(:, m))] for m = 0..M-1.
  const long block = n + n_cp;
  std::vector<cdouble> tx(static_cast<std::size_t>(block) * n_sym);
  std::vector<cdouble> symbol(static_cast<std::size_t>(n));
  for (std::size_t m = 0; m < n_sym; ++m) {
    for (long k = 0; k < n; ++k) {
      cdouble acc{};
      for (long sc = 0; sc < n; ++sc) {
        acc += frame.symbols(static_cast<std::size_t>(sc), m) *
               unit_phasor(static_cast<double>((sc * k) % n) / static_cast<double>(n));
      }
      symbol[static_cast<std::size_t>(k)] = acc / static_cast<double>(n);
    }
    const auto base = static_cast<std::size_t>(block) * m;
    for (long k = 0; k < n_cp; ++k) {
      tx[base + static_cast<std::size_t>(k)] = symbol[static_cast<std::size_t>(n - n_cp + k)];
    }
    for (long k = 0; k < n; ++k) {
      tx[base + static_cast<std::size_t>(n_cp + k)] = symbol[static_cast<std::size_t>(k)];
    }
  }

  // Receive stream: delayed, scaled copy of the transmit stream.
  const cdouble gain = std::polar(amplitude, phase_rad);
  std::vector<cdouble> rx(tx.size());
  for (std::size_t i = 0; i < rx.size(); ++i) {
    const auto src = static_cast<long>(i) - delay_samples;
    rx[i] = src >= 0 ? gain * tx[static_cast<std::size_t>(src)] : cdouble{};
  }

  ReceiveFrame y{CMatrix(cfg.n_subcarriers, n_sym), 0.0};
  for (std::size_t m = 0; m < n_sym; ++m) {
    const auto base = static_cast<std::size_t>(block) * m + static_cast<std::size_t>(n_cp);
    for (long sc = 0; sc < n; ++sc) {
      cdouble acc{};
      for (long k = 0; k < n; ++k) {
        acc += rx[base + static_cast<std::size_t>(k)] *
               unit_phasor(-static_cast<double>((sc * k) % n) / static_cast<double>(n));
      }
      y.values(static_cast<std::size_t>(sc), m) = acc;
    }
  }
  return y;
}

}  // namespace isac
