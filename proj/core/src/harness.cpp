#include "isac/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <thread>
#include <tuple>

#include "isac/error.hpp"

namespace isac {

namespace {

// Sub-stream identifiers within one trial.
enum Stream : std::uint64_t { kScene = 1, kPhases, kScatter, kSymbols, kNoise };

}  // namespace

std::string_view to_string(DetectionMode mode) noexcept {
  return mode == DetectionMode::Cfar ? "cfar" : "known_l";
}

DetectionMode parse_detection_mode(std::string_view text) {
  if (text == "known_l") return DetectionMode::KnownCount;
  if (text == "cfar") return DetectionMode::Cfar;
  throw InvalidParameter("unknown detection mode '" + std::string(text) + "'");
}

ScenarioConfig ScenarioConfig::desk_profile() {
  ScenarioConfig cfg;
  cfg.profile = "desk";
  cfg.frame = FrameConfig{256, 64, 30e3, 18, 3.5e9};
  cfg.scene = SceneSpec{};
  cfg.scattering = ScatteringParams::defaults_for(cfg.frame);
  cfg.trials = 300;
  return cfg;
}

ScenarioConfig ScenarioConfig::paper_profile() {
  ScenarioConfig cfg;
  cfg.profile = "paper";
  cfg.frame = FrameConfig{6552, 96, 30e3, 468, 3.5e9};
  cfg.scene = SceneSpec{16, 45.0, 145.0, -50.0, 50.0, 1.0, 0.0};
  cfg.scattering = ScatteringParams::defaults_for(cfg.frame);
  cfg.ordering = OrderingPolicy::Nearest;
  cfg.trials = 1000;
  return cfg;
}

ModulationAlphabet ScenarioConfig::alphabet() const {
  if (alphabet_kind == AlphabetKind::Custom) return make_custom_alphabet(custom_points);
  return make_alphabet(alphabet_kind);
}

void ScenarioConfig::validate() const {
  try {
    frame.validate();
    scattering.validate();
    cfar.validate();
    (void)alphabet();
  } catch (const InvalidParameter& e) {
    throw ConfigError(e.what());
  } catch (const InvalidAlphabet& e) {
    throw ConfigError(e.what());
  }
  if (trials == 0) throw ConfigError("trials must be >= 1");
  if (!std::isfinite(snr_y_db)) throw ConfigError("snr_y_db must be finite");
  if (targets.empty()) {
    if (scene.count == 0) throw ConfigError("scene.count must be >= 1");
    if (!(scene.distance_min_m < scene.distance_max_m) ||
        !(scene.velocity_min_mps < scene.velocity_max_mps)) {
      throw ConfigError("scene ranges must be non-degenerate");
    }
    for (double sep : {scene.min_separation_cells, scene.min_joint_separation_cells}) {
      if (!(sep >= 0.0) || !std::isfinite(sep)) {
        throw ConfigError("scene separations must be finite and >= 0");
      }
    }
    // The box is convex in both limits, so checking its corners suffices.
    for (double d : {scene.distance_min_m, scene.distance_max_m}) {
      for (double v : {scene.velocity_min_mps, scene.velocity_max_mps}) {
        check_target_feasible({d, v, 1.0}, frame, 0);
      }
    }
  } else {
    for (std::size_t i = 0; i < targets.size(); ++i) check_target_feasible(targets[i], frame, i);
  }
}

std::vector<TargetTruth> generate_scene(const SceneSpec& spec, const FrameConfig& cfg,
                                        CounterRng& rng) {
  if (spec.count == 0) throw InvalidParameter("scene needs at least one target");
  if (!(spec.distance_min_m < spec.distance_max_m) ||
      !(spec.velocity_min_mps < spec.velocity_max_mps)) {
    throw InvalidParameter("scene ranges must be non-degenerate");
  }
  if (!(spec.min_separation_cells >= 0.0) || !(spec.min_joint_separation_cells >= 0.0)) {
    throw InvalidParameter("separations must be >= 0");
  }
  constexpr int kMaxRedraws = 1000;
  const double d_res = cfg.range_resolution();
  const double v_res = cfg.velocity_resolution();
  const double min_joint_sq = spec.min_joint_separation_cells * spec.min_joint_separation_cells;
  auto too_close = [&](const TargetTruth& a, const TargetTruth& b) {
    const double dd = (a.distance_m - b.distance_m) / d_res;
    const double dv = (a.velocity_mps - b.velocity_mps) / v_res;
    return std::abs(dd) < spec.min_separation_cells || dd * dd + dv * dv < min_joint_sq;
  };
  // Sequential placement can box itself in; start the scene over when a
  // target cannot be placed.
  constexpr int kMaxRestarts = 1000;
  std::vector<TargetTruth> scene;
  scene.reserve(spec.count);
  std::size_t stuck_at = 0;
  for (int restart = 0; restart < kMaxRestarts; ++restart) {
    scene.clear();
    bool placed = true;
    for (std::size_t i = 0; i < spec.count && placed; ++i) {
      placed = false;
      for (int attempt = 0; attempt <= kMaxRedraws && !placed; ++attempt) {
        TargetTruth t;
        t.distance_m = rng.uniform(spec.distance_min_m, spec.distance_max_m);
        t.velocity_mps = rng.uniform(spec.velocity_min_mps, spec.velocity_max_mps);
        t.rcs_weight = 1.0;
        placed = std::none_of(scene.begin(), scene.end(),
                              [&](const TargetTruth& o) { return too_close(o, t); });
        if (placed) scene.push_back(t);
      }
      if (!placed) stuck_at = i;
    }
    if (placed) return scene;
  }
  throw SceneGenerationError("could not place target " + std::to_string(stuck_at) +
                             " apart from the others after 1000 re-draws in each of " +
                             std::to_string(kMaxRestarts) + " attempts");
}

TrialSignals simulate_signals(const ScenarioConfig& cfg, std::uint64_t trial_seed) {
  const CounterRng root(trial_seed);
  TrialSignals s;
  if (cfg.targets.empty()) {
    CounterRng rng = root.split(kScene);
    s.targets = generate_scene(cfg.scene, cfg.frame, rng);
  } else {
    s.targets = cfg.targets;
  }

  CounterRng phases = root.split(kPhases);
  auto calibrated = reflections_from_targets(s.targets, cfg.frame, cfg.snr_y_db, phases);
  s.specular = calibrated.reflections;
  s.noise_variance = calibrated.noise_variance;
  if (cfg.scattering.enabled) {
    CounterRng scatter = root.split(kScatter);
    for (const auto& r : s.specular) {
      auto cluster = expand_scattering(r, cfg.scattering, scatter);
      s.rays.insert(s.rays.end(), cluster.begin(), cluster.end());
    }
  } else {
    s.rays = s.specular;
  }

  CounterRng symbols = root.split(kSymbols);
  s.frame = draw_frame(cfg.frame, cfg.alphabet(), symbols);
  const auto channel = synthesize_channel(cfg.frame, s.rays);
  CounterRng noise = root.split(kNoise);
  const auto received = apply_channel(s.frame, channel, s.noise_variance, noise);
  s.h_hat = matched_filter(received, s.frame);
  return s;
}

Association associate(const std::vector<TargetEstimate>& estimates,
                      const std::vector<TargetTruth>& truth, const FrameConfig& cfg) {
  const double d_res = cfg.range_resolution();
  const double v_res = cfg.velocity_resolution();
  std::vector<std::tuple<double, std::size_t, std::size_t>> pairs;
  pairs.reserve(estimates.size() * truth.size());
  for (std::size_t t = 0; t < truth.size(); ++t) {
    for (std::size_t e = 0; e < estimates.size(); ++e) {
      const double dd = (estimates[e].distance_m - truth[t].distance_m) / d_res;
      const double dv = (estimates[e].velocity_mps - truth[t].velocity_mps) / v_res;
      pairs.emplace_back(dd * dd + dv * dv, t, e);
    }
  }
  std::sort(pairs.begin(), pairs.end());

  Association out;
  out.estimate_of_truth.assign(truth.size(), std::nullopt);
  std::vector<bool> used(estimates.size(), false);
  for (const auto& [cost, t, e] : pairs) {
    if (cost > kAssociationGate) break;
    if (out.estimate_of_truth[t] || used[e]) continue;
    out.estimate_of_truth[t] = e;
    used[e] = true;
  }
  for (std::size_t e = 0; e < estimates.size(); ++e) {
    if (!used[e]) out.false_alarms.push_back(e);
  }
  return out;
}

TrialResult run_trial(const ScenarioConfig& cfg, std::uint64_t trial_seed, std::size_t index) {
  TrialResult result;
  result.index = index;
  result.seed = trial_seed;
  TrialSignals s;
  try {
    s = simulate_signals(cfg, trial_seed);
  } catch (const Error& e) {
    result.error = e.what();
    return result;
  }

  std::size_t n_targets = s.targets.size();
  if (cfg.detection == DetectionMode::Cfar) {
    const auto rdm = compute_rdm(s.h_hat);
    n_targets = cluster_peaks(detect_cfar(rdm, cfg.cfar), rdm.delay_bins(), rdm.doppler_bins())
                    .size();
  }
  MitigationReport report;
  if (n_targets > 0) {
    report = run_mitigation(cfg.mitigation, s.h_hat, s.frame, n_targets, cfg.frame, cfg.ordering);
  }
  const auto& estimates = report.final_estimates();
  const auto matching = associate(estimates, s.targets, cfg.frame);

  std::vector<std::size_t> order(s.targets.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return s.targets[a].distance_m < s.targets[b].distance_m;
  });
  for (std::size_t t : order) {
    TargetOutcome o;
    o.truth_distance_m = s.targets[t].distance_m;
    o.truth_velocity_mps = s.targets[t].velocity_mps;
    const double a = s.specular[t].amplitude;
    o.snr = a * a / s.noise_variance;
    if (const auto e = matching.estimate_of_truth[t]) {
      o.matched = true;
      o.estimate_distance_m = estimates[*e].distance_m;
      o.estimate_velocity_mps = estimates[*e].velocity_mps;
      o.sq_error_distance = std::pow(o.estimate_distance_m - o.truth_distance_m, 2);
      o.sq_error_velocity = std::pow(o.estimate_velocity_mps - o.truth_velocity_mps, 2);
    }
    result.targets.push_back(o);
  }
  result.estimates = estimates.size();
  result.false_alarms = matching.false_alarms.size();
  result.unconverged = report.unconverged();
  return result;
}

std::vector<TrialResult> run_trials(const ScenarioConfig& cfg, unsigned threads) {
  cfg.validate();
  std::vector<TrialResult> results(cfg.trials);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k = next++; k < results.size(); k = next++) {
      results[k] = run_trial(cfg, derive_seed(cfg.seed, k), k);
    }
  };
  const unsigned n_workers = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(cfg.trials)));
  if (n_workers == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(n_workers);
    for (unsigned i = 0; i < n_workers; ++i) pool.emplace_back(worker);
  }
  return results;
}

double MseReport::mean_mse_distance() const noexcept {
  if (targets.empty()) return std::numeric_limits<double>::quiet_NaN();
  double acc = 0.0;
  for (const auto& t : targets) acc += t.mse_distance;
  return acc / static_cast<double>(targets.size());
}

double MseReport::mean_mse_velocity() const noexcept {
  if (targets.empty()) return std::numeric_limits<double>::quiet_NaN();
  double acc = 0.0;
  for (const auto& t : targets) acc += t.mse_velocity;
  return acc / static_cast<double>(targets.size());
}

MseReport aggregate(const std::vector<TrialResult>& results, const FrameConfig& cfg) {
  MseReport report;
  report.trials = results.size();
  std::size_t n_targets = 0;
  for (const auto& r : results) n_targets = std::max(n_targets, r.targets.size());
  report.targets.resize(n_targets);

  std::vector<std::size_t> seen(n_targets, 0);
  for (const auto& r : results) {
    if (!r.error.empty()) {
      ++report.failed_trials;
      continue;
    }
    report.false_alarms += r.false_alarms;
    report.unconverged += r.unconverged;
    for (std::size_t i = 0; i < r.targets.size(); ++i) {
      const auto& o = r.targets[i];
      auto& s = report.targets[i];
      ++seen[i];
      s.truth_distance_mean_m += o.truth_distance_m;
      s.mean_snr += o.snr;
      const auto bound = crb(cfg, o.snr);
      s.crb_distance += bound.distance_m2;
      s.crb_velocity += bound.velocity_m2s2;
      if (o.matched) {
        ++s.matched;
        s.mse_distance += o.sq_error_distance;
        s.mse_velocity += o.sq_error_velocity;
      }
    }
  }
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t i = 0; i < n_targets; ++i) {
    auto& s = report.targets[i];
    s.target_index = i;
    const auto n = static_cast<double>(seen[i]);
    s.truth_distance_mean_m = seen[i] ? s.truth_distance_mean_m / n : nan;
    s.mean_snr = seen[i] ? s.mean_snr / n : nan;
    s.crb_distance = seen[i] ? s.crb_distance / n : nan;
    s.crb_velocity = seen[i] ? s.crb_velocity / n : nan;
    s.miss_rate = seen[i] ? 1.0 - static_cast<double>(s.matched) / n : nan;
    const auto m = static_cast<double>(s.matched);
    s.mse_distance = s.matched ? s.mse_distance / m : nan;
    s.mse_velocity = s.matched ? s.mse_velocity / m : nan;
  }
  return report;
}

}  // namespace isac
