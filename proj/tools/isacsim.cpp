// isacsim: Monte-Carlo runs, SNR sweeps, RDM dumps and CRB tables.

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "isac/error.hpp"
#include "isac/estimate.hpp"
#include "isac/harness.hpp"
#include "isac/rdm.hpp"
#include "isac/scenario_io.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitInfeasible = 3;

double parse_number(std::string_view text) {
  double v = 0.0;
  auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || end != text.data() + text.size()) {
    throw isac::ConfigError("not a number: '" + std::string(text) + "'");
  }
  return v;
}

// "lo:step:hi" (inclusive) or a single value.
std::vector<double> parse_snr_range(const std::string& text) {
  const auto first = text.find(':');
  if (first == std::string::npos) return {parse_number(text)};
  const auto second = text.find(':', first + 1);
  if (second == std::string::npos) throw isac::ConfigError("SNR range must be lo:step:hi");
  const double lo = parse_number(std::string_view(text).substr(0, first));
  const double step = parse_number(std::string_view(text).substr(first + 1, second - first - 1));
  const double hi = parse_number(std::string_view(text).substr(second + 1));
  if (!(step > 0.0) || hi < lo) throw isac::ConfigError("SNR range needs step > 0 and lo <= hi");
  std::vector<double> out;
  for (std::size_t k = 0;; ++k) {
    const double v = lo + static_cast<double>(k) * step;
    if (v > hi + 1e-9 * step) break;
    out.push_back(v);
  }
  return out;
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

isac::MseReport simulate_into(const isac::ScenarioConfig& cfg, const fs::path& out,
                              unsigned threads) {
  const auto trials = isac::run_trials(cfg, threads);
  const auto report = isac::aggregate(trials, cfg.frame);
  isac::write_simulation_outputs(out, cfg, trials, report);
  return report;
}

double mean_of(const isac::MseReport& r, double isac::TargetStatistics::*field) {
  double acc = 0.0;
  for (const auto& t : r.targets) acc += t.*field;
  return r.targets.empty() ? 0.0 : acc / static_cast<double>(r.targets.size());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"OFDM ISAC sensing simulator"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_path;
  std::string snr_text = "-20:5:20";
  std::uint64_t seed = 0;
  unsigned threads = std::max(1u, std::thread::hardware_concurrency());

  auto* simulate = app.add_subcommand("simulate", "Run the Monte-Carlo trials of a scenario");
  simulate->add_option("--config", config_path, "Scenario JSON")->required();
  simulate->add_option("--out", out_path, "Output directory")->required();
  simulate->add_option("--threads", threads, "Worker threads");

  auto* sweep = app.add_subcommand("sweep", "Repeat a scenario over an SNR_Y grid");
  sweep->add_option("--config", config_path, "Scenario JSON")->required();
  sweep->add_option("--snr", snr_text, "lo:step:hi in dB");
  sweep->add_option("--out", out_path, "Output directory")->required();
  sweep->add_option("--threads", threads, "Worker threads");

  auto* dump = app.add_subcommand("rdm-dump", "Write one realization's |P|^2 in dB as CSV");
  dump->add_option("--config", config_path, "Scenario JSON")->required();
  dump->add_option("--seed", seed, "Trial seed")->required();
  dump->add_option("--out", out_path, "CSV file")->required();

  auto* bound = app.add_subcommand("crb", "Print CRB variances over a per-target SNR grid");
  bound->add_option("--config", config_path, "Scenario JSON")->required();
  bound->add_option("--snr", snr_text, "lo:step:hi in dB");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    const auto cfg = isac::load_scenario(config_path);
    if (*simulate) {
      simulate_into(cfg, out_path, threads);
    } else if (*sweep) {
      std::string summary = "snr_y_db,mean_mse_d,mean_crb_d,mean_mse_v,mean_crb_v,mean_miss_rate\n";
      for (double snr : parse_snr_range(snr_text)) {
        auto point = cfg;
        point.snr_y_db = snr;
        const auto report =
            simulate_into(point, fs::path(out_path) / ("snr_" + isac::format_double(snr)), threads);
        summary += isac::format_double(snr);
        for (auto field : {&isac::TargetStatistics::mse_distance,
                           &isac::TargetStatistics::crb_distance,
                           &isac::TargetStatistics::mse_velocity,
                           &isac::TargetStatistics::crb_velocity,
                           &isac::TargetStatistics::miss_rate}) {
          summary += ',' + isac::format_double(mean_of(report, field));
        }
        summary += '\n';
      }
      write_text(fs::path(out_path) / "sweep.csv", summary);
    } else if (*dump) {
      const auto signals = isac::simulate_signals(cfg, seed);
      write_text(out_path, isac::rdm_db_csv(isac::compute_rdm(signals.h_hat)));
    } else if (*bound) {
      std::string table = "snr_db,var_d,var_v\n";
      for (double snr_db : parse_snr_range(snr_text)) {
        const auto v = isac::crb(cfg.frame, std::pow(10.0, snr_db / 10.0));
        table += isac::format_double(snr_db) + ',' + isac::format_double(v.distance_m2) + ',' +
                 isac::format_double(v.velocity_m2s2) + '\n';
      }
      std::cout << table;
    }
  } catch (const isac::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const isac::ScenarioInfeasible& e) {
    std::cerr << "scenario infeasible: " << e.what() << '\n';
    return kExitInfeasible;
  } catch (const isac::SceneGenerationError& e) {
    std::cerr << "scenario infeasible: " << e.what() << '\n';
    return kExitInfeasible;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
