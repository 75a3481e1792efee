#include "fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <utility>
#include <vector>

namespace isac::detail {

namespace {

struct PlanPair {
  fftw_plan rows = nullptr;  // length M, one per row
  fftw_plan cols = nullptr;  // length N, one per column
};

class PlanCache {
 public:
  ~PlanCache() {
    for (auto& [key, plans] : plans_) {
      fftw_destroy_plan(plans.rows);
      fftw_destroy_plan(plans.cols);
    }
  }

  // FFTW planning is not thread safe; execution of an existing plan is.
  PlanPair get(int n_rows, int n_cols) {
    std::lock_guard lock(mutex_);
    const auto key = std::make_pair(n_rows, n_cols);
    if (auto it = plans_.find(key); it != plans_.end()) return it->second;

    std::vector<fftw_complex> scratch(static_cast<std::size_t>(n_rows) * n_cols);
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    PlanPair p;
    p.rows = fftw_plan_many_dft(1, &n_cols, n_rows, scratch.data(), nullptr, 1, n_cols,
                                scratch.data(), nullptr, 1, n_cols, FFTW_FORWARD, flags);
    p.cols = fftw_plan_many_dft(1, &n_rows, n_cols, scratch.data(), nullptr, n_cols, 1,
                                scratch.data(), nullptr, n_cols, 1, FFTW_BACKWARD, flags);
    plans_.emplace(key, p);
    return p;
  }

 private:
  std::mutex mutex_;
  std::map<std::pair<int, int>, PlanPair> plans_;
};

PlanCache& plan_cache() {
  static PlanCache cache;
  return cache;
}

}  // namespace

void rdm_transform(CMatrix& values) {
  if (values.empty()) return;
  const auto plans =
      plan_cache().get(static_cast<int>(values.rows()), static_cast<int>(values.cols()));
  // std::complex<double> is layout compatible with fftw_complex.
  auto* data = reinterpret_cast<fftw_complex*>(values.data());
  fftw_execute_dft(plans.rows, data, data);
  fftw_execute_dft(plans.cols, data, data);
}

}  // namespace isac::detail
