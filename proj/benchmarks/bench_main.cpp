#include <benchmark/benchmark.h>

#include <vector>

#include "isac/channel.hpp"
#include "isac/estimate.hpp"
#include "isac/frame.hpp"
#include "isac/harness.hpp"
#include "isac/mitigate.hpp"
#include "isac/rdm.hpp"
#include "isac/rng.hpp"

using namespace isac;

namespace {

FrameConfig frame_of(benchmark::State& state) {
  FrameConfig cfg;
  cfg.n_subcarriers = static_cast<std::size_t>(state.range(0));
  cfg.n_symbols = static_cast<std::size_t>(state.range(1));
  return cfg;
}

CMatrix noise_matrix(const FrameConfig& cfg, std::uint64_t seed) {
  CounterRng rng(seed);
  CMatrix h(cfg.n_subcarriers, cfg.n_symbols);
  for (auto& v : h.flat()) v = rng.complex_normal(1.0);
  return h;
}

void BM_ComputeRdm(benchmark::State& state) {
  const auto h = noise_matrix(frame_of(state), 1);
  for (auto _ : state) benchmark::DoNotOptimize(compute_rdm(h));
}
BENCHMARK(BM_ComputeRdm)->Args({256, 64})->Args({1024, 128})->Args({6552, 96})->Unit(benchmark::kMicrosecond);

void BM_SynthesizeChannel(benchmark::State& state) {
  const auto cfg = frame_of(state);
  std::vector<Reflection> paths;
  CounterRng rng(2);
  for (int l = 0; l < 8; ++l) paths.push_back({1.0, rng.uniform(0.0, 2e-6), rng.uniform(-2e3, 2e3), 0.0});
  for (auto _ : state) benchmark::DoNotOptimize(synthesize_channel(cfg, paths));
}
BENCHMARK(BM_SynthesizeChannel)->Args({256, 64})->Args({6552, 96})->Unit(benchmark::kMicrosecond);

void BM_RefinePeak(benchmark::State& state) {
  const auto cfg = frame_of(state);
  auto h = noise_matrix(cfg, 3);
  CounterRng rng(4);
  const auto frame = draw_frame(cfg, make_alphabet(AlphabetKind::Qpsk), rng);
  const std::vector<Reflection> target{
      {20.0, 10.3 / (cfg.n_subcarriers * cfg.subcarrier_spacing_hz), 3.6 / (cfg.n_symbols * cfg.symbol_duration()), 0.5}};
  h += synthesize_channel(cfg, target).values;
  const Detection det{10, 4, 0.0};
  for (auto _ : state) benchmark::DoNotOptimize(refine_peak(h, det, cfg));
}
BENCHMARK(BM_RefinePeak)->Args({256, 64})->Args({6552, 96})->Unit(benchmark::kMicrosecond);

void BM_Trial(benchmark::State& state) {
  ScenarioConfig cfg = ScenarioConfig::desk_profile();
  cfg.mitigation = static_cast<MitigationMode>(state.range(0));
  std::uint64_t seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(run_trial(cfg, derive_seed(1, seed++)));
  state.SetLabel(std::string(to_string(cfg.mitigation)));
}
BENCHMARK(BM_Trial)
    ->Arg(static_cast<int>(MitigationMode::MatchedFilterOnly))
    ->Arg(static_cast<int>(MitigationMode::Cstc))
    ->Arg(static_cast<int>(MitigationMode::Ecstc))
    ->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
