#ifndef CNSPEC_FFT_HPP_
#define CNSPEC_FFT_HPP_

#include <fftw3.h>

#include <complex>
#include <cstring>
#include <map>
#include <mutex>
#include <vector>

#include "cnspec/grid.hpp"

namespace cnspec {
namespace detail {

// One cached c2c plan per (dim, n, direction).  Plans are created once under
// a mutex; execution uses the new-array interface on fftw_malloc'd buffers,
// so concurrent transforms on distinct arrays are safe.
class FftPlans {
 public:
  static FftPlans& instance() {
    static FftPlans p;
    return p;
  }

  fftw_plan get(int dim, int n, int sign) {
    std::lock_guard<std::mutex> lock(mutex_);
    const auto key = std::make_tuple(dim, n, sign);
    auto it = plans_.find(key);
    if (it != plans_.end()) return it->second;

    std::size_t total = 1;
    std::vector<int> dims(dim, n);
    for (int i = 0; i < dim; ++i) total *= static_cast<std::size_t>(n);
    fftw_complex* buf = fftw_alloc_complex(total);
    fftw_plan plan = fftw_plan_dft(dim, dims.data(), buf, buf, sign, FFTW_ESTIMATE);
    fftw_free(buf);
    plans_.emplace(key, plan);
    return plan;
  }

 private:
  FftPlans() = default;
  std::mutex mutex_;
  std::map<std::tuple<int, int, int>, fftw_plan> plans_;
};

inline void run_dft(const Grid& g, const std::complex<double>* in, std::complex<double>* out, int sign) {
  const std::size_t n = g.npts();
  fftw_plan plan = FftPlans::instance().get(g.dim, g.points_per_dim, sign);
  fftw_complex* buf = fftw_alloc_complex(n);
  std::memcpy(buf, in, n * sizeof(fftw_complex));
  fftw_execute_dft(plan, buf, buf);
  std::memcpy(out, buf, n * sizeof(fftw_complex));
  fftw_free(buf);
}

}  // namespace detail

/// Forward transform, normalized so that f(x) = sum_k fhat(k) e^{i k.x}:
/// a constant field c has fhat(0) = c.
inline void fft_forward(const Grid& g, const std::complex<double>* in, std::complex<double>* out) {
  detail::run_dft(g, in, out, FFTW_FORWARD);
  const double scale = 1.0 / static_cast<double>(g.npts());
  const std::size_t n = g.npts();
  for (std::size_t i = 0; i < n; ++i) out[i] *= scale;
}

/// Inverse of fft_forward (plain exponential sum, no scaling).
inline void fft_inverse(const Grid& g, const std::complex<double>* in, std::complex<double>* out) {
  detail::run_dft(g, in, out, FFTW_BACKWARD);
}

}  // namespace cnspec

#endif  // CNSPEC_FFT_HPP_
