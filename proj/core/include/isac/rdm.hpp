#pragma once

#include <vector>

#include "isac/channel.hpp"
#include "isac/frame.hpp"
#include "isac/matrix.hpp"

namespace isac {

/// Matched-filter output H_hat = Y o conj(X).
struct ChannelEstimate {
  CMatrix values;
};

/// Periodogram P_hat: rows are delay bins (1 / (N df) each), columns Doppler
/// bins (1 / (M T_S) each).
struct RangeDopplerMatrix {
  CMatrix values;

  std::size_t delay_bins() const noexcept { return values.rows(); }
  std::size_t doppler_bins() const noexcept { return values.cols(); }
  double power(std::size_t nu, std::size_t mu) const noexcept { return std::norm(values(nu, mu)); }
};

ChannelEstimate matched_filter(const ReceiveFrame& received, const SymbolFrame& frame);

/// P(nu, mu) = 1/(N M) sum_n sum_m H(n, m) exp(-j 2 pi m mu / M) exp(+j 2 pi n nu / N).
/// No window; with |X| = 1 a single on-grid path maps to one bin of value a e^{j phi}.
RangeDopplerMatrix compute_rdm(const CMatrix& h_hat);
inline RangeDopplerMatrix compute_rdm(const ChannelEstimate& h_hat) {
  return compute_rdm(h_hat.values);
}

/// The same double sum evaluated at real-valued (nu, mu); periodic in both.
cdouble dtft_point(const CMatrix& h_hat, double nu, double mu);
inline cdouble dtft_point(const ChannelEstimate& h_hat, double nu, double mu) {
  return dtft_point(h_hat.values, nu, mu);
}

/// dtft_point restricted to a line of constant Doppler. Construction costs
/// O(N M); each evaluation along delay costs O(N).
class DelayCut {
 public:
  DelayCut(const CMatrix& h_hat, double mu);
  cdouble operator()(double nu) const;
  /// d/dnu of operator().
  cdouble derivative(double nu) const;

 private:
  std::vector<cdouble> profile_;  // sum_m H(n, m) exp(-j 2 pi m mu / M) / (N M)
};

/// dtft_point restricted to a line of constant delay; O(M) per evaluation.
class DopplerCut {
 public:
  DopplerCut(const CMatrix& h_hat, double nu);
  cdouble operator()(double mu) const;
  cdouble derivative(double mu) const;

 private:
  std::vector<cdouble> profile_;  // sum_n H(n, m) exp(+j 2 pi n nu / N) / (N M)
};

}  // namespace isac
