#include "isac/scenario_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <system_error>

#include <json.hpp>

#include "isac/error.hpp"

namespace isac {

namespace {

using nlohmann::json;

void reject_unknown(const json& obj, std::string_view where,
                    std::initializer_list<std::string_view> allowed) {
  if (!obj.is_object()) throw ConfigError(std::string(where) + " must be a JSON object");
  for (const auto& item : obj.items()) {
    bool known = false;
    for (auto key : allowed) known = known || item.key() == key;
    if (!known) {
      throw ConfigError("unknown key '" + item.key() + "' in " + std::string(where));
    }
  }
}

template <typename T>
void read(const json& obj, const char* key, T& out, std::string_view where) {
  auto it = obj.find(key);
  if (it == obj.end()) return;
  try {
    if constexpr (std::is_same_v<T, double>) {
      if (!it->is_number()) throw ConfigError("");
      out = it->template get<double>();
    } else if constexpr (std::is_same_v<T, bool>) {
      if (!it->is_boolean()) throw ConfigError("");
      out = it->template get<bool>();
    } else if constexpr (std::is_unsigned_v<T>) {
      if (!it->is_number_unsigned()) throw ConfigError("");
      out = it->template get<T>();
    } else {
      if (!it->is_string()) throw ConfigError("");
      out = it->template get<T>();
    }
  } catch (const std::exception&) {
    throw ConfigError("bad value for '" + std::string(key) + "' in " + std::string(where));
  }
}

void read_range(const json& obj, const char* key, double& lo, double& hi) {
  auto it = obj.find(key);
  if (it == obj.end()) return;
  if (!it->is_array() || it->size() != 2 || !(*it)[0].is_number() || !(*it)[1].is_number()) {
    throw ConfigError(std::string("scene.") + key + " must be [low, high]");
  }
  lo = (*it)[0].get<double>();
  hi = (*it)[1].get<double>();
}

template <typename Parse>
auto read_enum(const json& obj, const char* key, Parse parse) -> decltype(parse("")) {
  std::string text;
  read(obj, key, text, "scenario");
  try {
    return parse(text);
  } catch (const InvalidParameter& e) {
    throw ConfigError(e.what());
  }
}

void parse_alphabet(const json& node, ScenarioConfig& cfg) {
  if (node.is_string()) {
    try {
      cfg.alphabet_kind = parse_alphabet_kind(node.get<std::string>());
    } catch (const Error& e) {
      throw ConfigError(e.what());
    }
    cfg.custom_points.clear();
    return;
  }
  reject_unknown(node, "alphabet", {"kind", "points"});
  std::string kind = std::string(to_string(cfg.alphabet_kind));
  read(node, "kind", kind, "alphabet");
  try {
    cfg.alphabet_kind = parse_alphabet_kind(kind);
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
  cfg.custom_points.clear();
  if (auto it = node.find("points"); it != node.end()) {
    if (!it->is_array()) throw ConfigError("alphabet.points must be a list of [re, im] pairs");
    for (const auto& p : *it) {
      if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number()) {
        throw ConfigError("alphabet.points must be a list of [re, im] pairs");
      }
      cfg.custom_points.emplace_back(p[0].get<double>(), p[1].get<double>());
    }
  }
  if (cfg.alphabet_kind == AlphabetKind::Custom && cfg.custom_points.empty()) {
    throw ConfigError("custom alphabet needs a non-empty point list");
  }
  if (cfg.alphabet_kind != AlphabetKind::Custom && !cfg.custom_points.empty()) {
    throw ConfigError("alphabet.points is only allowed with kind \"custom\"");
  }
}

json pair_json(double a, double b) { return json::array({a, b}); }

}  // namespace

ScenarioConfig parse_scenario(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("invalid JSON: ") + e.what());
  }
  reject_unknown(doc, "scenario",
                 {"profile", "frame", "alphabet", "targets", "scene", "snr_y_db", "scattering",
                  "mitigation", "ordering", "detection", "cfar", "trials", "seed"});

  std::string profile = "desk";
  read(doc, "profile", profile, "scenario");
  ScenarioConfig cfg;
  if (profile == "desk") {
    cfg = ScenarioConfig::desk_profile();
  } else if (profile == "paper") {
    cfg = ScenarioConfig::paper_profile();
  } else {
    throw ConfigError("unknown profile '" + profile + "'");
  }

  if (auto it = doc.find("frame"); it != doc.end()) {
    reject_unknown(*it, "frame",
                   {"n_subcarriers", "n_symbols", "subcarrier_spacing_hz", "cp_samples",
                    "carrier_frequency_hz"});
    read(*it, "n_subcarriers", cfg.frame.n_subcarriers, "frame");
    read(*it, "n_symbols", cfg.frame.n_symbols, "frame");
    read(*it, "subcarrier_spacing_hz", cfg.frame.subcarrier_spacing_hz, "frame");
    read(*it, "cp_samples", cfg.frame.cp_samples, "frame");
    read(*it, "carrier_frequency_hz", cfg.frame.carrier_frequency_hz, "frame");
  }
  if (auto it = doc.find("alphabet"); it != doc.end()) parse_alphabet(*it, cfg);

  if (auto it = doc.find("targets"); it != doc.end()) {
    if (!it->is_array() || it->empty()) throw ConfigError("targets must be a non-empty list");
    cfg.targets.clear();
    for (const auto& t : *it) {
      reject_unknown(t, "targets[]", {"distance_m", "velocity_mps", "rcs_weight"});
      if (!t.contains("distance_m") || !t.contains("velocity_mps")) {
        throw ConfigError("each target needs distance_m and velocity_mps");
      }
      TargetTruth truth;
      read(t, "distance_m", truth.distance_m, "targets[]");
      read(t, "velocity_mps", truth.velocity_mps, "targets[]");
      read(t, "rcs_weight", truth.rcs_weight, "targets[]");
      if (!(truth.distance_m > 0.0) || !std::isfinite(truth.distance_m) ||
          !std::isfinite(truth.velocity_mps) || !(truth.rcs_weight > 0.0) ||
          !std::isfinite(truth.rcs_weight)) {
        throw ConfigError("targets need d > 0, finite v and rcs_weight > 0");
      }
      cfg.targets.push_back(truth);
    }
  }
  if (auto it = doc.find("scene"); it != doc.end()) {
    if (doc.contains("targets")) throw ConfigError("give either targets or scene, not both");
    reject_unknown(*it, "scene",
                   {"count", "distance_range_m", "velocity_range_mps", "min_separation_cells",
                    "min_joint_separation_cells"});
    read(*it, "count", cfg.scene.count, "scene");
    read_range(*it, "distance_range_m", cfg.scene.distance_min_m, cfg.scene.distance_max_m);
    read_range(*it, "velocity_range_mps", cfg.scene.velocity_min_mps, cfg.scene.velocity_max_mps);
    read(*it, "min_separation_cells", cfg.scene.min_separation_cells, "scene");
    read(*it, "min_joint_separation_cells", cfg.scene.min_joint_separation_cells, "scene");
  }
  read(doc, "snr_y_db", cfg.snr_y_db, "scenario");

  // The jitter default scales with the Doppler bin, so it follows the frame.
  cfg.scattering.doppler_jitter_hz = ScatteringParams::defaults_for(cfg.frame).doppler_jitter_hz;
  if (auto it = doc.find("scattering"); it != doc.end()) {
    reject_unknown(*it, "scattering", {"enabled", "rho", "k_s", "extent_m", "doppler_jitter_hz"});
    read(*it, "enabled", cfg.scattering.enabled, "scattering");
    read(*it, "rho", cfg.scattering.diffuse_fraction, "scattering");
    read(*it, "k_s", cfg.scattering.n_rays, "scattering");
    read(*it, "extent_m", cfg.scattering.extent_m, "scattering");
    read(*it, "doppler_jitter_hz", cfg.scattering.doppler_jitter_hz, "scattering");
  }
  if (doc.contains("mitigation")) cfg.mitigation = read_enum(doc, "mitigation", parse_mitigation_mode);
  if (doc.contains("ordering")) cfg.ordering = read_enum(doc, "ordering", parse_ordering_policy);
  if (doc.contains("detection")) cfg.detection = read_enum(doc, "detection", parse_detection_mode);
  if (auto it = doc.find("cfar"); it != doc.end()) {
    reject_unknown(*it, "cfar", {"guard_nu", "guard_mu", "train_nu", "train_mu", "pfa"});
    read(*it, "guard_nu", cfg.cfar.guard_nu, "cfar");
    read(*it, "guard_mu", cfg.cfar.guard_mu, "cfar");
    read(*it, "train_nu", cfg.cfar.train_nu, "cfar");
    read(*it, "train_mu", cfg.cfar.train_mu, "cfar");
    read(*it, "pfa", cfg.cfar.false_alarm_rate, "cfar");
  }
  read(doc, "trials", cfg.trials, "scenario");
  read(doc, "seed", cfg.seed, "scenario");

  cfg.validate();
  return cfg;
}

ScenarioConfig load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_scenario(text.str());
}

namespace {

json scenario_json(const ScenarioConfig& cfg) {
  json doc;
  doc["profile"] = cfg.profile;
  doc["frame"] = {{"n_subcarriers", cfg.frame.n_subcarriers},
                  {"n_symbols", cfg.frame.n_symbols},
                  {"subcarrier_spacing_hz", cfg.frame.subcarrier_spacing_hz},
                  {"cp_samples", cfg.frame.cp_samples},
                  {"carrier_frequency_hz", cfg.frame.carrier_frequency_hz}};
  json alphabet = {{"kind", std::string(to_string(cfg.alphabet_kind))}};
  if (cfg.alphabet_kind == AlphabetKind::Custom) {
    json points = json::array();
    for (const auto& p : cfg.custom_points) points.push_back(pair_json(p.real(), p.imag()));
    alphabet["points"] = points;
  }
  doc["alphabet"] = alphabet;
  if (cfg.targets.empty()) {
    doc["scene"] = {
        {"count", cfg.scene.count},
        {"distance_range_m", pair_json(cfg.scene.distance_min_m, cfg.scene.distance_max_m)},
        {"velocity_range_mps", pair_json(cfg.scene.velocity_min_mps, cfg.scene.velocity_max_mps)},
        {"min_separation_cells", cfg.scene.min_separation_cells},
        {"min_joint_separation_cells", cfg.scene.min_joint_separation_cells}};
  } else {
    json targets = json::array();
    for (const auto& t : cfg.targets) {
      targets.push_back({{"distance_m", t.distance_m},
                         {"velocity_mps", t.velocity_mps},
                         {"rcs_weight", t.rcs_weight}});
    }
    doc["targets"] = targets;
  }
  doc["snr_y_db"] = cfg.snr_y_db;
  doc["scattering"] = {{"enabled", cfg.scattering.enabled},
                       {"rho", cfg.scattering.diffuse_fraction},
                       {"k_s", cfg.scattering.n_rays},
                       {"extent_m", cfg.scattering.extent_m},
                       {"doppler_jitter_hz", cfg.scattering.doppler_jitter_hz}};
  doc["mitigation"] = std::string(to_string(cfg.mitigation));
  doc["ordering"] = std::string(to_string(cfg.ordering));
  doc["detection"] = std::string(to_string(cfg.detection));
  doc["cfar"] = {{"guard_nu", cfg.cfar.guard_nu},
                 {"guard_mu", cfg.cfar.guard_mu},
                 {"train_nu", cfg.cfar.train_nu},
                 {"train_mu", cfg.cfar.train_mu},
                 {"pfa", cfg.cfar.false_alarm_rate}};
  doc["trials"] = cfg.trials;
  doc["seed"] = cfg.seed;
  return doc;
}

// NaN and infinities have no JSON literal; they become null.
json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

}  // namespace

std::string scenario_to_json(const ScenarioConfig& cfg) { return scenario_json(cfg).dump(2); }

std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value);
  if (ec != std::errc{}) throw std::runtime_error("to_chars failed");
  return std::string(buf, end);
}

std::string trial_to_json_line(const TrialResult& trial) {
  json t;
  t["index"] = trial.index;
  t["seed"] = trial.seed;
  json targets = json::array();
  for (const auto& o : trial.targets) {
    json row = {{"d", o.truth_distance_m},
                {"v", o.truth_velocity_mps},
                {"snr", number_or_null(o.snr)},
                {"matched", o.matched}};
    if (o.matched) {
      row["d_hat"] = o.estimate_distance_m;
      row["v_hat"] = o.estimate_velocity_mps;
      row["sq_err_d"] = o.sq_error_distance;
      row["sq_err_v"] = o.sq_error_velocity;
    }
    targets.push_back(row);
  }
  t["targets"] = targets;
  t["estimates"] = trial.estimates;
  t["false_alarms"] = trial.false_alarms;
  t["unconverged"] = trial.unconverged;
  if (!trial.error.empty()) t["error"] = trial.error;
  return t.dump();
}

std::string mse_report_csv(const MseReport& report) {
  std::string out = "target_index,truth_d_mean,mse_d,crb_d,mse_v,crb_v,miss_rate\n";
  for (const auto& s : report.targets) {
    out += std::to_string(s.target_index);
    for (double v : {s.truth_distance_mean_m, s.mse_distance, s.crb_distance, s.mse_velocity,
                     s.crb_velocity, s.miss_rate}) {
      out += ',';
      out += format_double(v);
    }
    out += '\n';
  }
  return out;
}

std::string report_to_json(const ScenarioConfig& cfg, const MseReport& report) {
  json doc;
  doc["config"] = scenario_json(cfg);
  json targets = json::array();
  for (const auto& s : report.targets) {
    targets.push_back({{"target_index", s.target_index},
                       {"truth_d_mean", number_or_null(s.truth_distance_mean_m)},
                       {"mse_d", number_or_null(s.mse_distance)},
                       {"crb_d", number_or_null(s.crb_distance)},
                       {"mse_v", number_or_null(s.mse_velocity)},
                       {"crb_v", number_or_null(s.crb_velocity)},
                       {"mean_snr", number_or_null(s.mean_snr)},
                       {"miss_rate", number_or_null(s.miss_rate)},
                       {"matched", s.matched}});
  }
  doc["summary"] = {{"trials", report.trials},
                    {"failed_trials", report.failed_trials},
                    {"false_alarms", report.false_alarms},
                    {"unconverged", report.unconverged},
                    {"mean_mse_d", number_or_null(report.mean_mse_distance())},
                    {"mean_mse_v", number_or_null(report.mean_mse_velocity())},
                    {"targets", targets}};
  return doc.dump(2) + "\n";
}

void write_simulation_outputs(const std::filesystem::path& dir, const ScenarioConfig& cfg,
                              const std::vector<TrialResult>& trials, const MseReport& report) {
  std::filesystem::create_directories(dir);
  auto write = [&](const char* name, const std::string& text) {
    std::ofstream out(dir / name, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + (dir / name).string());
    out << text;
  };
  write("mse_per_target.csv", mse_report_csv(report));
  std::string lines;
  for (const auto& t : trials) lines += trial_to_json_line(t) + "\n";
  write("trials.jsonl", lines);
  write("report.json", report_to_json(cfg, report));
}

std::string rdm_db_csv(const RangeDopplerMatrix& rdm) {
  const std::size_t n = rdm.delay_bins();
  const std::size_t m = rdm.doppler_bins();
  std::string out = "delay_bin";
  for (std::size_t mu = 0; mu < m; ++mu) out += ',' + std::to_string(mu);
  out += '\n';
  for (std::size_t nu = 0; nu < n; ++nu) {
    out += std::to_string(nu);
    for (std::size_t mu = 0; mu < m; ++mu) {
      out += ',';
      out += format_double(10.0 * std::log10(rdm.power(nu, mu)));
    }
    out += '\n';
  }
  return out;
}

}  // namespace isac
