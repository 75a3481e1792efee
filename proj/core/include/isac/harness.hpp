#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "isac/channel.hpp"
#include "isac/estimate.hpp"
#include "isac/frame.hpp"
#include "isac/mitigate.hpp"
#include "isac/rdm.hpp"
#include "isac/rng.hpp"

namespace isac {

enum class DetectionMode { KnownCount, Cfar };

std::string_view to_string(DetectionMode mode) noexcept;
/// "known_l" | "cfar"
DetectionMode parse_detection_mode(std::string_view text);

/// Random scene: distances and velocities uniform in the given ranges.
/// The defaults fit the desk frame: every delay stays inside the 18-sample
/// prefix and every Doppler shift below df / 10.
struct SceneSpec {
  std::size_t count = 8;
  double distance_min_m = 100.0;
  double distance_max_m = 320.0;
  double velocity_min_mps = -120.0;
  double velocity_max_mps = 120.0;
  /// Minimum range gap between targets, in range cells c0 / (2 N df).
  double min_separation_cells = 1.0;
  /// Minimum sqrt((dd / range_res)^2 + (dv / velocity_res)^2); 0 disables it.
  double min_joint_separation_cells = 2.0;

  bool operator==(const SceneSpec&) const = default;
};

struct ScenarioConfig {
  std::string profile = "desk";
  FrameConfig frame;
  AlphabetKind alphabet_kind = AlphabetKind::Qam64;
  std::vector<cdouble> custom_points;
  /// Fixed scene; when empty a new scene is drawn from `scene` every trial.
  std::vector<TargetTruth> targets;
  SceneSpec scene;
  double snr_y_db = 0.0;
  ScatteringParams scattering = ScatteringParams::defaults_for(FrameConfig{});
  MitigationMode mitigation = MitigationMode::Ecstc;
  OrderingPolicy ordering = OrderingPolicy::Strongest;
  DetectionMode detection = DetectionMode::KnownCount;
  CfarParams cfar;
  std::size_t trials = 300;
  std::uint64_t seed = 1;

  /// N=256, M=64, df=30 kHz, 18-sample CP, fc=3.5 GHz, 8 targets, 300 trials.
  static ScenarioConfig desk_profile();
  /// N=6552, M=96, df=30 kHz, 468-sample CP, 16 targets in [45, 145] m x
  /// [-50, 50] m/s, range separation only, nearest-first, 1000 trials.
  static ScenarioConfig paper_profile();

  ModulationAlphabet alphabet() const;
  std::size_t target_count() const noexcept {
    return targets.empty() ? scene.count : targets.size();
  }
  /// Throws ConfigError for malformed values and ScenarioInfeasible when a fixed
  /// target, or a corner of the random-scene box, violates the CP / ICI limits.
  void validate() const;

  bool operator==(const ScenarioConfig&) const = default;
};

/// Draws `spec.count` targets with unit rcs_weight. A target that violates either
/// separation rule against an earlier one is re-drawn, up to 1000 times; the
/// whole scene is then started over, up to 1000 times, before giving up with
/// SceneGenerationError.
std::vector<TargetTruth> generate_scene(const SceneSpec& spec, const FrameConfig& cfg,
                                        CounterRng& rng);

/// Everything a trial produces before estimation.
struct TrialSignals {
  std::vector<TargetTruth> targets;
  std::vector<Reflection> specular;  // one per target, calibrated
  std::vector<Reflection> rays;      // after scattering expansion
  double noise_variance = 0.0;
  SymbolFrame frame;
  ChannelEstimate h_hat;
};

TrialSignals simulate_signals(const ScenarioConfig& cfg, std::uint64_t trial_seed);

struct Association {
  /// truth index -> estimate index, or nullopt for a miss.
  std::vector<std::optional<std::size_t>> estimate_of_truth;
  std::vector<std::size_t> false_alarms;
};

/// Gate on the normalized cost (dd / range_res)^2 + (dv / velocity_res)^2.
inline constexpr double kAssociationGate = 1.0;

/// Greedy one-to-one matching by ascending normalized cost; pairs above
/// kAssociationGate stay unmatched.
Association associate(const std::vector<TargetEstimate>& estimates,
                      const std::vector<TargetTruth>& truth, const FrameConfig& cfg);

struct TargetOutcome {
  double truth_distance_m = 0.0;
  double truth_velocity_mps = 0.0;
  double snr = 0.0;  // |a|^2 / sigma_W^2, linear
  bool matched = false;
  double estimate_distance_m = 0.0;
  double estimate_velocity_mps = 0.0;
  double sq_error_distance = 0.0;
  double sq_error_velocity = 0.0;
};

struct TrialResult {
  std::size_t index = 0;
  std::uint64_t seed = 0;
  /// Ordered by ascending true distance.
  std::vector<TargetOutcome> targets;
  std::size_t estimates = 0;
  std::size_t false_alarms = 0;
  std::size_t unconverged = 0;
  /// Non-empty when the trial could not be run (e.g. infeasible scene).
  std::string error;
};

TrialResult run_trial(const ScenarioConfig& cfg, std::uint64_t trial_seed,
                      std::size_t index = 0);

/// cfg.trials trials with seeds derive_seed(cfg.seed, k). The result does not
/// depend on `threads`.
std::vector<TrialResult> run_trials(const ScenarioConfig& cfg, unsigned threads = 1);

struct TargetStatistics {
  std::size_t target_index = 0;
  double truth_distance_mean_m = 0.0;
  double mse_distance = 0.0;
  double mse_velocity = 0.0;
  /// Mean over trials of the bound at that trial's per-target SNR.
  double crb_distance = 0.0;
  double crb_velocity = 0.0;
  double mean_snr = 0.0;
  double miss_rate = 0.0;
  std::size_t matched = 0;
};

struct MseReport {
  std::vector<TargetStatistics> targets;
  std::size_t trials = 0;
  std::size_t failed_trials = 0;
  std::size_t false_alarms = 0;
  std::size_t unconverged = 0;

  double mean_mse_distance() const noexcept;
  double mean_mse_velocity() const noexcept;
};

/// Per-target-index means of the squared errors over matched trials.
MseReport aggregate(const std::vector<TrialResult>& results, const FrameConfig& cfg);

}  // namespace isac
