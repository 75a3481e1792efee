#include "isac/mitigate.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "isac/constants.hpp"
#include "isac/error.hpp"

namespace isac {

namespace {

cdouble unit_phasor(double cycles) noexcept {
  const double frac = cycles - std::nearbyint(cycles);
  return std::polar(1.0, kTwoPi * frac);
}

std::size_t wrap(long index, std::size_t len) noexcept {
  const auto l = static_cast<long>(len);
  return static_cast<std::size_t>(((index % l) + l) % l);
}

double circular_gap(double a, double b, double period) noexcept {
  const double d = std::fmod(std::abs(a - b), period);
  return std::min(d, period - d);
}

// A detection duplicates an earlier estimate when it lies within half a bin of
// it on both axes.
bool duplicates(const Detection& det, const std::vector<TargetEstimate>& earlier,
                std::size_t rows, std::size_t cols) noexcept {
  return std::any_of(earlier.begin(), earlier.end(), [&](const TargetEstimate& e) {
    return circular_gap(static_cast<double>(det.nu), e.refined_nu, static_cast<double>(rows)) <=
               0.5 &&
           circular_gap(static_cast<double>(det.mu), e.refined_mu, static_cast<double>(cols)) <= 0.5;
  });
}

// Strongest cell of `rdm` that is not a duplicate; restricted to the 3x3
// neighbourhood of `around` when given.
Detection pick_peak(const RangeDopplerMatrix& rdm, const std::vector<TargetEstimate>& earlier,
                    const Detection* around) {
  const std::size_t rows = rdm.delay_bins();
  const std::size_t cols = rdm.doppler_bins();
  std::vector<Detection> cells;
  if (around != nullptr) {
    for (long dn = -1; dn <= 1; ++dn) {
      for (long dm = -1; dm <= 1; ++dm) {
        const std::size_t nu = wrap(static_cast<long>(around->nu) + dn, rows);
        const std::size_t mu = wrap(static_cast<long>(around->mu) + dm, cols);
        cells.push_back({nu, mu, rdm.power(nu, mu)});
      }
    }
  } else {
    cells.reserve(rows * cols);
    for (std::size_t nu = 0; nu < rows; ++nu) {
      for (std::size_t mu = 0; mu < cols; ++mu) cells.push_back({nu, mu, rdm.power(nu, mu)});
    }
  }
  std::sort(cells.begin(), cells.end(), [](const Detection& a, const Detection& b) {
    if (a.peak_power != b.peak_power) return a.peak_power > b.peak_power;
    if (a.nu != b.nu) return a.nu < b.nu;
    return a.mu < b.mu;
  });
  for (const auto& c : cells) {
    if (!duplicates(c, earlier, rows, cols)) return c;
  }
  return cells.front();
}

Detection nearest_bin(double nu, double mu, const CMatrix& h_hat) {
  Detection det;
  det.nu = wrap(std::lround(nu), h_hat.rows());
  det.mu = wrap(std::lround(mu), h_hat.cols());
  det.peak_power = std::norm(dtft_point(h_hat, static_cast<double>(det.nu),
                                        static_cast<double>(det.mu)));
  return det;
}

}  // namespace

std::string_view to_string(MitigationMode mode) noexcept {
  switch (mode) {
    case MitigationMode::MatchedFilterOnly: return "mf";
    case MitigationMode::Cstc: return "cstc";
    case MitigationMode::Ecstc: return "ecstc";
  }
  return "unknown";
}

std::string_view to_string(OrderingPolicy policy) noexcept {
  switch (policy) {
    case OrderingPolicy::Strongest: return "strongest";
    case OrderingPolicy::Nearest: return "nearest";
  }
  return "unknown";
}

MitigationMode parse_mitigation_mode(std::string_view text) {
  if (text == "mf") return MitigationMode::MatchedFilterOnly;
  if (text == "cstc") return MitigationMode::Cstc;
  if (text == "ecstc") return MitigationMode::Ecstc;
  throw InvalidParameter("unknown mitigation mode '" + std::string(text) + "'");
}

OrderingPolicy parse_ordering_policy(std::string_view text) {
  if (text == "strongest") return OrderingPolicy::Strongest;
  if (text == "nearest") return OrderingPolicy::Nearest;
  throw InvalidParameter("unknown ordering policy '" + std::string(text) + "'");
}

std::size_t MitigationReport::unconverged() const noexcept {
  const auto& est = final_estimates();
  return static_cast<std::size_t>(
      std::count_if(est.begin(), est.end(), [](const TargetEstimate& e) { return !e.converged; }));
}

CMatrix target_footprint(const SymbolFrame& frame, const TargetEstimate& est) {
  const std::size_t rows = frame.symbols.rows();
  const std::size_t cols = frame.symbols.cols();
  std::vector<cdouble> along_delay(rows);
  std::vector<cdouble> along_doppler(cols);
  for (std::size_t n = 0; n < rows; ++n) {
    along_delay[n] = est.amplitude * unit_phasor(-est.refined_nu * static_cast<double>(n) /
                                                 static_cast<double>(rows));
  }
  for (std::size_t m = 0; m < cols; ++m) {
    along_doppler[m] =
        unit_phasor(est.refined_mu * static_cast<double>(m) / static_cast<double>(cols));
  }
  CMatrix out(rows, cols);
  for (std::size_t n = 0; n < rows; ++n) {
    const auto x = frame.symbols.row(n);
    auto dst = out.row(n);
    for (std::size_t m = 0; m < cols; ++m) dst[m] = std::norm(x[m]) * along_delay[n] * along_doppler[m];
  }
  return out;
}

InterferenceTemplate synth_target_rdm(const SymbolFrame& frame, const TargetEstimate& est) {
  InterferenceTemplate t;
  t.footprint = target_footprint(frame, est);
  t.rdm = compute_rdm(t.footprint).values;
  t.amplitude = est.amplitude;
  t.nu = est.refined_nu;
  t.mu = est.refined_mu;
  return t;
}

MitigationReport matched_filter_only(const ChannelEstimate& h_hat, std::size_t n_targets,
                                     const FrameConfig& cfg, const RefineOptions& refine) {
  if (n_targets == 0) throw InvalidParameter("target count must be >= 1");
  MitigationReport report;
  const auto rdm = compute_rdm(h_hat);
  for (const auto& det : strongest_peaks(rdm, n_targets)) {
    report.first_pass.push_back(refine_peak(h_hat.values, det, cfg, refine));
    report.residual_peak_power.push_back(det.peak_power);
  }
  return report;
}

MitigationReport cstc(const ChannelEstimate& h_hat, const SymbolFrame& frame,
                      std::size_t n_targets, const FrameConfig& cfg, OrderingPolicy order,
                      const RefineOptions& refine) {
  if (n_targets == 0) throw InvalidParameter("target count must be >= 1");
  if (!h_hat.values.same_shape(frame.symbols)) {
    throw InvalidParameter("channel estimate and frame dimensions differ");
  }

  // Nearest-first reuses the targets found strongest-first and only changes the
  // order of cancellation. Ordering raw periodogram peaks instead lets a sidelobe
  // jump ahead of a target hidden under a stronger neighbour.
  std::vector<Detection> schedule;
  if (order == OrderingPolicy::Nearest) {
    auto found = cstc(h_hat, frame, n_targets, cfg, OrderingPolicy::Strongest, refine).first_pass;
    std::stable_sort(found.begin(), found.end(), [](const TargetEstimate& a, const TargetEstimate& b) {
      return a.distance_m < b.distance_m;
    });
    for (const auto& e : found) schedule.push_back(nearest_bin(e.refined_nu, e.refined_mu, h_hat.values));
  }

  MitigationReport report;
  CMatrix residual = h_hat.values;
  for (std::size_t l = 0; l < n_targets; ++l) {
    const auto rdm = compute_rdm(residual);
    const Detection* around = schedule.empty() ? nullptr : &schedule[l];
    const Detection det = pick_peak(rdm, report.first_pass, around);
    TargetEstimate est = refine_peak(residual, det, cfg, refine);
    InterferenceTemplate tmpl = synth_target_rdm(frame, est);
    residual -= tmpl.footprint;
    report.residual_peak_power.push_back(det.peak_power);
    report.first_pass.push_back(est);
    report.templates.push_back(std::move(tmpl));
  }
  return report;
}

MitigationReport ecstc(MitigationReport report, const ChannelEstimate& h_hat,
                       const FrameConfig& cfg,
                       const RefineOptions& refine) {
  if (report.templates.size() != report.first_pass.size() || report.first_pass.empty()) {
    throw InvalidParameter("ecstc needs a first pass with one template per target");
  }
  // H_hat minus every first-pass footprint; target l gets its own back.
  CMatrix all_removed = h_hat.values;
  for (const auto& t : report.templates) all_removed -= t.footprint;

  report.second_pass.clear();
  report.second_pass.reserve(report.first_pass.size());
  for (std::size_t l = 0; l < report.first_pass.size(); ++l) {
    const CMatrix isolated = all_removed + report.templates[l].footprint;
    const auto& first = report.first_pass[l];
    const Detection seed = nearest_bin(first.refined_nu, first.refined_mu, isolated);
    report.second_pass.push_back(refine_peak(isolated, seed, cfg, refine));
  }
  return report;
}

MitigationReport run_mitigation(MitigationMode mode, const ChannelEstimate& h_hat,
                                const SymbolFrame& frame, std::size_t n_targets,
                                const FrameConfig& cfg, OrderingPolicy order,
                                const RefineOptions& refine) {
  switch (mode) {
    case MitigationMode::MatchedFilterOnly:
      return matched_filter_only(h_hat, n_targets, cfg, refine);
    case MitigationMode::Cstc:
      return cstc(h_hat, frame, n_targets, cfg, order, refine);
    case MitigationMode::Ecstc:
      return ecstc(cstc(h_hat, frame, n_targets, cfg, order, refine), h_hat, cfg, refine);
  }
  throw InvalidParameter("unknown mitigation mode");
}

}  // namespace isac
