#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "isac/harness.hpp"
#include "isac/rdm.hpp"

namespace isac {

/// Parses a JSON scenario. Fields not given keep the values of the selected
/// "profile" ("desk" by default). Unknown keys, wrong types and invalid values
/// raise ConfigError; geometric infeasibility raises ScenarioInfeasible.
ScenarioConfig parse_scenario(std::string_view json_text);
ScenarioConfig load_scenario(const std::filesystem::path& path);

/// Complete JSON form of a config; parse_scenario(scenario_to_json(c)) == c.
std::string scenario_to_json(const ScenarioConfig& cfg);

/// Shortest decimal form that reads back to the same double.
std::string format_double(double value);

std::string trial_to_json_line(const TrialResult& trial);
/// Header: target_index,truth_d_mean,mse_d,crb_d,mse_v,crb_v,miss_rate
std::string mse_report_csv(const MseReport& report);
std::string report_to_json(const ScenarioConfig& cfg, const MseReport& report);

/// Writes mse_per_target.csv, trials.jsonl and report.json into `dir`.
void write_simulation_outputs(const std::filesystem::path& dir, const ScenarioConfig& cfg,
                              const std::vector<TrialResult>& trials, const MseReport& report);

/// 10 log10 |P|^2 per bin. The first row holds the Doppler bin indices and
/// the first column the delay bin index.
std::string rdm_db_csv(const RangeDopplerMatrix& rdm);

}  // namespace isac
