#pragma once

#include <memory>

#include "csp/num_core.hpp"

namespace csp {

/// Thin RAII wrapper over an FFTW complex-to-complex plan pair of fixed size.
/// Transforms are unnormalised; backward(forward(x)) == n * x.
class FFTPlan {
 public:
  explicit FFTPlan(std::size_t n);
  ~FFTPlan();
  FFTPlan(const FFTPlan&) = delete;
  FFTPlan& operator=(const FFTPlan&) = delete;
  FFTPlan(FFTPlan&&) noexcept;
  FFTPlan& operator=(FFTPlan&&) noexcept;

  std::size_t size() const { return n_; }
  void forward(const CVec& in, CVec& out) const;
  void backward(const CVec& in, CVec& out) const;

 private:
  struct Impl;
  std::size_t n_;
  std::unique_ptr<Impl> impl_;
};

/// Angular wavenumbers for n samples with period `length`, FFTW ordering.
RVec wavenumbers(std::size_t n, double length);

/// Spectral derivative of order `order` treating the n samples as one period
/// of length n*h. Optionally evaluates on the grid shifted by `shift` (in units of x).
CVec spectral_derivative(std::span<const cplx> f, double h, int order, double shift = 0.0);

}  // namespace csp
