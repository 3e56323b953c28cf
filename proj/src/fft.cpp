#include "csp/fft.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cstring>
#include <mutex>

namespace csp {

namespace {
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace

struct FFTPlan::Impl {
  fftw_complex* buf_in = nullptr;
  fftw_complex* buf_out = nullptr;
  fftw_plan fwd = nullptr;
  fftw_plan bwd = nullptr;
};

FFTPlan::FFTPlan(std::size_t n) : n_(n), impl_(std::make_unique<Impl>()) {
  std::lock_guard lock(planner_mutex());
  impl_->buf_in = fftw_alloc_complex(n);
  impl_->buf_out = fftw_alloc_complex(n);
  const int ni = static_cast<int>(n);
  impl_->fwd = fftw_plan_dft_1d(ni, impl_->buf_in, impl_->buf_out, FFTW_FORWARD, FFTW_ESTIMATE);
  impl_->bwd = fftw_plan_dft_1d(ni, impl_->buf_in, impl_->buf_out, FFTW_BACKWARD, FFTW_ESTIMATE);
}

FFTPlan::~FFTPlan() {
  if (!impl_) return;
  std::lock_guard lock(planner_mutex());
  fftw_destroy_plan(impl_->fwd);
  fftw_destroy_plan(impl_->bwd);
  fftw_free(impl_->buf_in);
  fftw_free(impl_->buf_out);
}

FFTPlan::FFTPlan(FFTPlan&&) noexcept = default;
FFTPlan& FFTPlan::operator=(FFTPlan&&) noexcept = default;

namespace {
void run(fftw_plan plan, fftw_complex* in, fftw_complex* out, const CVec& src, CVec& dst, std::size_t n) {
  if (src.size() != n) throw std::invalid_argument("FFTPlan: size mismatch");
  std::memcpy(in, src.data(), n * sizeof(fftw_complex));
  fftw_execute_dft(plan, in, out);
  dst.resize(n);
  std::memcpy(static_cast<void*>(dst.data()), out, n * sizeof(fftw_complex));
}
}  // namespace

// fftw_execute_dft on the plan's own buffers is safe from several threads as
// long as each call uses distinct arrays; buffers here are per-plan, so a plan
// must not be shared between threads.
void FFTPlan::forward(const CVec& in, CVec& out) const {
  run(impl_->fwd, impl_->buf_in, impl_->buf_out, in, out, n_);
}

void FFTPlan::backward(const CVec& in, CVec& out) const {
  run(impl_->bwd, impl_->buf_in, impl_->buf_out, in, out, n_);
}

RVec wavenumbers(std::size_t n, double length) {
  RVec k(n);
  const double dk = 2.0 * kPi / length;
  for (std::size_t i = 0; i < n; ++i) {
    const long m = (i <= n / 2) ? static_cast<long>(i) : static_cast<long>(i) - static_cast<long>(n);
    k[i] = dk * static_cast<double>(m);
  }
  if (n % 2 == 0) k[n / 2] = 0.0;  // Nyquist mode carries no derivative
  return k;
}

CVec spectral_derivative(std::span<const cplx> f, double h, int order, double shift) {
  const std::size_t n = f.size();
  FFTPlan plan(n);
  CVec in(f.begin(), f.end()), hat;
  plan.forward(in, hat);
  const RVec k = wavenumbers(n, h * static_cast<double>(n));
  for (std::size_t i = 0; i < n; ++i) {
    cplx factor = 1.0;
    for (int o = 0; o < order; ++o) factor *= kI * k[i];
    if (shift != 0.0) factor *= std::exp(kI * k[i] * shift);
    if (order == 0 && n % 2 == 0 && i == n / 2 && shift != 0.0) factor = std::cos(kPi * shift / h);
    hat[i] *= factor / static_cast<double>(n);
  }
  CVec out;
  plan.backward(hat, out);
  return out;
}

}  // namespace csp
