#pragma once

#include <cstddef>
#include <string_view>
#include <vector>

#include "isac/estimate.hpp"
#include "isac/frame.hpp"
#include "isac/rdm.hpp"

namespace isac {

enum class MitigationMode { MatchedFilterOnly, Cstc, Ecstc };
enum class OrderingPolicy { Strongest, Nearest };

std::string_view to_string(MitigationMode mode) noexcept;
std::string_view to_string(OrderingPolicy policy) noexcept;
/// "mf" | "cstc" | "ecstc"
MitigationMode parse_mitigation_mode(std::string_view text);
/// "strongest" | "nearest"
OrderingPolicy parse_ordering_policy(std::string_view text);

/// Contribution of one estimated target, both before the range-Doppler
/// transform (|X|^2 o a_tilde) and after it (A_hat).
struct InterferenceTemplate {
  CMatrix footprint;
  CMatrix rdm;
  cdouble amplitude{};
  double nu = 0.0;
  double mu = 0.0;
};

struct MitigationReport {
  std::vector<TargetEstimate> first_pass;
  /// Filled by ecstc only.
  std::vector<TargetEstimate> second_pass;
  /// Peak power of the residual periodogram at each first-pass detection.
  std::vector<double> residual_peak_power;
  std::vector<InterferenceTemplate> templates;

  const std::vector<TargetEstimate>& final_estimates() const noexcept {
    return second_pass.empty() ? first_pass : second_pass;
  }
  std::size_t unconverged() const noexcept;
};

/// |X(n, m)|^2 a exp(-j 2 pi nu n / N) exp(+j 2 pi mu m / M) using the refined
/// continuous bins of `est`.
CMatrix target_footprint(const SymbolFrame& frame, const TargetEstimate& est);

/// Footprint together with its range-Doppler image; the transform and
/// normalization are those of compute_rdm.
InterferenceTemplate synth_target_rdm(const SymbolFrame& frame, const TargetEstimate& est);

/// Plain matched-filter processing: the `n_targets` strongest local maxima of
/// the periodogram, each refined on the unmodified channel estimate.
MitigationReport matched_filter_only(const ChannelEstimate& h_hat, std::size_t n_targets,
                                     const FrameConfig& cfg, const RefineOptions& refine = {});

/// Coherent successive target cancellation. Each iteration detects on the
/// residual H_hat - sum(previous footprints), refines there and subtracts the
/// new footprint. Subtraction happens before the transform, which by linearity
/// equals subtracting A_hat from the periodogram.
MitigationReport cstc(const ChannelEstimate& h_hat, const SymbolFrame& frame,
                      std::size_t n_targets, const FrameConfig& cfg,
                      OrderingPolicy order = OrderingPolicy::Strongest,
                      const RefineOptions& refine = {});

/// Second estimation pass: target l is re-refined on H_hat minus the
/// first-pass footprints of every other target. Templates are not recomputed.
MitigationReport ecstc(MitigationReport report, const ChannelEstimate& h_hat,
                       const FrameConfig& cfg,
                       const RefineOptions& refine = {});

MitigationReport run_mitigation(MitigationMode mode, const ChannelEstimate& h_hat,
                                const SymbolFrame& frame, std::size_t n_targets,
                                const FrameConfig& cfg, OrderingPolicy order,
                                const RefineOptions& refine = {});

}  // namespace isac
