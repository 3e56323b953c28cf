#pragma once

// Shared numerical kernels: grids, complex Gamma, Cauchy integrals on an
// interval, finite differences, dense complex solves, 1-D complex root
// refinement. Everything here is a pure function of its arguments.

#include <array>
#include <complex>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace csp {

using cplx = std::complex<double>;
using CVec = std::vector<cplx>;
using RVec = std::vector<double>;

inline constexpr double kPi = 3.14159265358979323846264338327950288;
inline constexpr cplx kI{0.0, 1.0};

/// Raised when a numerical procedure cannot produce a trustworthy result.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Uniform grid, endpoints included.
class Grid1D {
 public:
  Grid1D() = default;
  Grid1D(double x_min, double x_max, std::size_t n);

  double x_min() const { return x_min_; }
  double x_max() const { return x_max_; }
  std::size_t size() const { return n_; }
  double h() const { return (x_max_ - x_min_) / static_cast<double>(n_ - 1); }
  double operator[](std::size_t i) const { return x_min_ + h() * static_cast<double>(i); }
  RVec points() const;

 private:
  double x_min_ = 0.0;
  double x_max_ = 1.0;
  std::size_t n_ = 2;
};

/// Dense complex matrix, row-major storage.
class ComplexMatrix {
 public:
  ComplexMatrix() = default;
  ComplexMatrix(std::size_t rows, std::size_t cols, cplx fill = {});

  static ComplexMatrix identity(std::size_t n);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  cplx& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  const cplx& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
  std::span<const cplx> data() const { return data_; }

  CVec operator*(std::span<const cplx> v) const;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  CVec data_;
};

// ---------------------------------------------------------------------------
// 2x2 complex matrices are everywhere in the Lax-pair and RHP code.

struct Mat2 {
  cplx a{1.0}, b{0.0}, c{0.0}, d{1.0};  // [[a, b], [c, d]]

  static Mat2 identity() { return {}; }
  static Mat2 zero() { return {0.0, 0.0, 0.0, 0.0}; }

  cplx det() const { return a * d - b * c; }
  Mat2 inverse() const;
  Mat2 conj() const { return {std::conj(a), std::conj(b), std::conj(c), std::conj(d)}; }
  cplx operator()(int r, int col) const;
  double max_abs() const;

  friend Mat2 operator*(const Mat2& x, const Mat2& y) {
    return {x.a * y.a + x.b * y.c, x.a * y.b + x.b * y.d,
            x.c * y.a + x.d * y.c, x.c * y.b + x.d * y.d};
  }
  friend Mat2 operator+(const Mat2& x, const Mat2& y) {
    return {x.a + y.a, x.b + y.b, x.c + y.c, x.d + y.d};
  }
  friend Mat2 operator-(const Mat2& x, const Mat2& y) {
    return {x.a - y.a, x.b - y.b, x.c - y.c, x.d - y.d};
  }
  friend Mat2 operator*(cplx s, const Mat2& x) { return {s * x.a, s * x.b, s * x.c, s * x.d}; }
};

/// sigma_2 X sigma_2 with sigma_2 = [[0, -i], [i, 0]].
inline Mat2 sigma2_conjugate(const Mat2& x) { return {x.d, -x.c, -x.b, x.a}; }

/// Exponential of a traceless 2x2 matrix (exact closed form, det = 1).
Mat2 expm_traceless(const Mat2& k);

// ---------------------------------------------------------------------------
// Special functions

/// Gamma(z) by the Lanczos approximation, reflected for Re z < 1/2.
/// Throws std::domain_error at z = 0, -1, -2, ...
cplx complex_gamma(cplx z);

/// 1 / Gamma(z); entire, returns exactly 0 at the poles of Gamma.
cplx reciprocal_gamma(cplx z);

// ---------------------------------------------------------------------------
// Quadrature

/// Trapezoid rule on a uniform grid.
cplx trapezoid(std::span<const cplx> f, double h);
double trapezoid(std::span<const double> f, double h);

/// Running integral F(x_i) = int_{x_0}^{x_i} f, fourth-order accurate.
RVec cumulative_integral(std::span<const double> f, double h);
CVec cumulative_integral(std::span<const cplx> f, double h);

/// int_a^b f(s) / (s - z) ds for f sampled on `grid` and z off the segment.
/// Switches to panel-wise product integration (exact against 1/(s-z)) when
/// z is within 10 grid spacings of the segment.
cplx pv_cauchy_integral(std::span<const cplx> f, const Grid1D& grid, cplx z);

// ---------------------------------------------------------------------------
// Differentiation

/// Fourth-order central differences, one-sided fourth-order closures at the ends.
CVec derivative_fd4(std::span<const cplx> f, double h);

// ---------------------------------------------------------------------------
// Dense linear algebra

class SingularMatrixError : public NumericalError {
 public:
  SingularMatrixError(const std::string& what, double condition)
      : NumericalError(what), condition_(condition) {}
  double condition_estimate() const { return condition_; }

 private:
  double condition_;
};

/// Solves A x = b with partial pivoting. Throws SingularMatrixError when the
/// reciprocal condition estimate falls below `rcond_min`.
CVec solve_dense(const ComplexMatrix& a, std::span<const cplx> b, double rcond_min = 1e-14);

/// Same factorisation, several right-hand sides (columns of `b`).
ComplexMatrix solve_dense(const ComplexMatrix& a, const ComplexMatrix& b, double rcond_min = 1e-14);

// ---------------------------------------------------------------------------
// Root refinement

struct RootResult {
  cplx z;
  double residual = 0.0;
  int iterations = 0;
  bool converged = false;
};

using AnalyticFn = std::function<cplx(cplx)>;

/// Derivative of an analytic function from four points z +- h, z +- ih.
cplx analytic_derivative(const AnalyticFn& f, cplx z, double h = 1e-3);

/// Newton iteration with a numerical derivative.
RootResult newton_refine(const AnalyticFn& f, cplx z0, double tol = 1e-13, int max_iter = 50);

}  // namespace csp
