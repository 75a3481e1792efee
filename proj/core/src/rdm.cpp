#include "isac/rdm.hpp"

#include <cmath>

#include "fft.hpp"
#include "isac/constants.hpp"
#include "isac/error.hpp"

namespace isac {

namespace {

// exp(j 2 pi k x / len) with k x reduced modulo len.
cdouble kernel(double k, double x, double len) noexcept {
  double cycles = k * x / len;
  cycles -= std::nearbyint(cycles);
  return std::polar(1.0, kTwoPi * cycles);
}

}  // namespace

ChannelEstimate matched_filter(const ReceiveFrame& received, const SymbolFrame& frame) {
  if (!received.values.same_shape(frame.symbols)) {
    throw InvalidParameter("receive frame and symbol frame dimensions differ");
  }
  ChannelEstimate h{CMatrix(received.values.rows(), received.values.cols())};
  const auto y = received.values.flat();
  const auto x = frame.symbols.flat();
  auto out = h.values.flat();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = y[i] * std::conj(x[i]);
  return h;
}

RangeDopplerMatrix compute_rdm(const CMatrix& h_hat) {
  if (h_hat.rows() < 2 || h_hat.cols() < 2) {
    throw InvalidParameter("range-Doppler processing needs N, M >= 2");
  }
  RangeDopplerMatrix p{h_hat};
  detail::rdm_transform(p.values);
  const double scale = 1.0 / static_cast<double>(h_hat.size());
  for (auto& v : p.values.flat()) v *= scale;
  return p;
}

cdouble dtft_point(const CMatrix& h_hat, double nu, double mu) {
  const auto n_rows = static_cast<double>(h_hat.rows());
  const auto n_cols = static_cast<double>(h_hat.cols());
  std::vector<cdouble> doppler_kernel(h_hat.cols());
  for (std::size_t m = 0; m < h_hat.cols(); ++m) {
    doppler_kernel[m] = kernel(-static_cast<double>(m), mu, n_cols);
  }
  cdouble total{};
  for (std::size_t n = 0; n < h_hat.rows(); ++n) {
    const auto row = h_hat.row(n);
    cdouble acc{};
    for (std::size_t m = 0; m < row.size(); ++m) acc += row[m] * doppler_kernel[m];
    total += acc * kernel(static_cast<double>(n), nu, n_rows);
  }
  return total / (n_rows * n_cols);
}

DelayCut::DelayCut(const CMatrix& h_hat, double mu) : profile_(h_hat.rows()) {
  const auto n_cols = static_cast<double>(h_hat.cols());
  const double norm = 1.0 / static_cast<double>(h_hat.size());
  std::vector<cdouble> doppler_kernel(h_hat.cols());
  for (std::size_t m = 0; m < h_hat.cols(); ++m) {
    doppler_kernel[m] = kernel(-static_cast<double>(m), mu, n_cols) * norm;
  }
  for (std::size_t n = 0; n < h_hat.rows(); ++n) {
    const auto row = h_hat.row(n);
    cdouble acc{};
    for (std::size_t m = 0; m < row.size(); ++m) acc += row[m] * doppler_kernel[m];
    profile_[n] = acc;
  }
}

cdouble DelayCut::operator()(double nu) const {
  const auto len = static_cast<double>(profile_.size());
  cdouble acc{};
  for (std::size_t n = 0; n < profile_.size(); ++n) {
    acc += profile_[n] * kernel(static_cast<double>(n), nu, len);
  }
  return acc;
}

cdouble DelayCut::derivative(double nu) const {
  const auto len = static_cast<double>(profile_.size());
  cdouble acc{};
  for (std::size_t n = 0; n < profile_.size(); ++n) {
    const auto k = static_cast<double>(n);
    acc += profile_[n] * kernel(k, nu, len) * cdouble(0.0, kTwoPi * k / len);
  }
  return acc;
}

DopplerCut::DopplerCut(const CMatrix& h_hat, double nu) : profile_(h_hat.cols()) {
  const auto n_rows = static_cast<double>(h_hat.rows());
  const double norm = 1.0 / static_cast<double>(h_hat.size());
  for (std::size_t n = 0; n < h_hat.rows(); ++n) {
    const cdouble w = kernel(static_cast<double>(n), nu, n_rows) * norm;
    const auto row = h_hat.row(n);
    for (std::size_t m = 0; m < row.size(); ++m) profile_[m] += row[m] * w;
  }
}

cdouble DopplerCut::operator()(double mu) const {
  const auto len = static_cast<double>(profile_.size());
  cdouble acc{};
  for (std::size_t m = 0; m < profile_.size(); ++m) {
    acc += profile_[m] * kernel(-static_cast<double>(m), mu, len);
  }
  return acc;
}

cdouble DopplerCut::derivative(double mu) const {
  const auto len = static_cast<double>(profile_.size());
  cdouble acc{};
  for (std::size_t m = 0; m < profile_.size(); ++m) {
    const auto k = static_cast<double>(m);
    acc += profile_[m] * kernel(-k, mu, len) * cdouble(0.0, -kTwoPi * k / len);
  }
  return acc;
}

}  // namespace isac
