#include "csp/num_core.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace csp {

Grid1D::Grid1D(double x_min, double x_max, std::size_t n) : x_min_(x_min), x_max_(x_max), n_(n) {
  if (n < 2) throw std::invalid_argument("Grid1D: need at least two samples");
  if (!(x_max > x_min)) throw std::invalid_argument("Grid1D: x_max must exceed x_min");
}

RVec Grid1D::points() const {
  RVec out(n_);
  for (std::size_t i = 0; i < n_; ++i) out[i] = (*this)[i];
  return out;
}

ComplexMatrix::ComplexMatrix(std::size_t rows, std::size_t cols, cplx fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

ComplexMatrix ComplexMatrix::identity(std::size_t n) {
  ComplexMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

CVec ComplexMatrix::operator*(std::span<const cplx> v) const {
  if (v.size() != cols_) throw std::invalid_argument("ComplexMatrix: size mismatch");
  CVec out(rows_, 0.0);
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = 0; c < cols_; ++c) out[r] += (*this)(r, c) * v[c];
  return out;
}

Mat2 Mat2::inverse() const {
  const cplx dt = det();
  if (dt == 0.0) throw NumericalError("Mat2::inverse: singular 2x2 matrix");
  return {d / dt, -b / dt, -c / dt, a / dt};
}

cplx Mat2::operator()(int r, int col) const {
  if (r == 0) return col == 0 ? a : b;
  return col == 0 ? c : d;
}

double Mat2::max_abs() const {
  return std::max({std::abs(a), std::abs(b), std::abs(c), std::abs(d)});
}

Mat2 expm_traceless(const Mat2& k) {
  // k^2 = -det(k) I for traceless k, so exp(k) = cosh(s) I + sinh(s)/s k, s^2 = -det k.
  const cplx s = std::sqrt(-k.det());
  const cplx ch = std::cosh(s);
  cplx sh_over_s;
  if (std::abs(s) < 1e-4) {
    const cplx s2 = s * s;
    sh_over_s = 1.0 + s2 / 6.0 + s2 * s2 / 120.0;
  } else {
    sh_over_s = std::sinh(s) / s;
  }
  return {ch + sh_over_s * k.a, sh_over_s * k.b, sh_over_s * k.c, ch + sh_over_s * k.d};
}

// ---------------------------------------------------------------------------

namespace {

constexpr int kLanczosG = 7;
constexpr std::array<double, 9> kLanczosCoef = {
    0.99999999999980993,  676.5203681218851,     -1259.1392167224028,
    771.32342877765313,   -176.61502916214059,   12.507343278686905,
    -0.13857109526572012, 9.9843695780195716e-6, 1.5056327351493116e-7};

bool is_nonpositive_integer(cplx z) {
  return z.imag() == 0.0 && z.real() <= 0.0 && std::floor(z.real()) == z.real();
}

// log Gamma(z) for Re z >= 1/2.
cplx lanczos_log_gamma(cplx z) {
  z -= 1.0;
  cplx x = kLanczosCoef[0];
  for (int i = 1; i < kLanczosG + 2; ++i) x += kLanczosCoef[i] / (z + static_cast<double>(i));
  const cplx t = z + (kLanczosG + 0.5);
  return 0.5 * std::log(2.0 * kPi) + (z + 0.5) * std::log(t) - t + std::log(x);
}

}  // namespace

cplx complex_gamma(cplx z) {
  if (is_nonpositive_integer(z)) throw std::domain_error("complex_gamma: pole at non-positive integer");
  if (z.real() < 0.5) return kPi / (std::sin(kPi * z) * std::exp(lanczos_log_gamma(1.0 - z)));
  return std::exp(lanczos_log_gamma(z));
}

cplx reciprocal_gamma(cplx z) {
  if (is_nonpositive_integer(z)) return 0.0;
  if (z.real() < 0.5) return std::sin(kPi * z) * std::exp(lanczos_log_gamma(1.0 - z)) / kPi;
  return std::exp(-lanczos_log_gamma(z));
}

// ---------------------------------------------------------------------------

cplx trapezoid(std::span<const cplx> f, double h) {
  if (f.size() < 2) return 0.0;
  cplx s = 0.5 * (f.front() + f.back());
  for (std::size_t i = 1; i + 1 < f.size(); ++i) s += f[i];
  return s * h;
}

double trapezoid(std::span<const double> f, double h) {
  if (f.size() < 2) return 0.0;
  double s = 0.5 * (f.front() + f.back());
  for (std::size_t i = 1; i + 1 < f.size(); ++i) s += f[i];
  return s * h;
}

namespace {

template <class T>
std::vector<T> cumulative_impl(std::span<const T> f, double h) {
  const std::size_t n = f.size();
  std::vector<T> out(n, T{});
  if (n < 2) return out;
  if (n < 4) {
    for (std::size_t i = 1; i < n; ++i) out[i] = out[i - 1] + 0.5 * h * (f[i - 1] + f[i]);
    return out;
  }
  for (std::size_t i = 0; i + 1 < n; ++i) {
    T panel;
    if (i == 0) {
      panel = h / 24.0 * (9.0 * f[0] + 19.0 * f[1] - 5.0 * f[2] + f[3]);
    } else if (i + 2 == n) {
      panel = h / 24.0 * (9.0 * f[n - 1] + 19.0 * f[n - 2] - 5.0 * f[n - 3] + f[n - 4]);
    } else {
      panel = h / 24.0 * (-f[i - 1] + 13.0 * f[i] + 13.0 * f[i + 1] - f[i + 2]);
    }
    out[i + 1] = out[i] + panel;
  }
  return out;
}

// Monomial coefficients (in tau) of the cubic through tau = off, off+1, off+2, off+3.
std::array<cplx, 4> cubic_coefficients(const std::array<cplx, 4>& v, int off) {
  // Newton divided differences on unit-spaced nodes, then expand.
  const double t0 = off, t1 = off + 1, t2 = off + 2;
  const cplx d1a = v[1] - v[0], d1b = v[2] - v[1], d1c = v[3] - v[2];
  const cplx d2a = 0.5 * (d1b - d1a), d2b = 0.5 * (d1c - d1b);
  const cplx d3 = (d2b - d2a) / 3.0;
  // P = v0 + d1a (t-t0) + d2a (t-t0)(t-t1) + d3 (t-t0)(t-t1)(t-t2)
  std::array<cplx, 4> c{};
  c[0] = v[0] - d1a * t0 + d2a * t0 * t1 - d3 * t0 * t1 * t2;
  c[1] = d1a - d2a * (t0 + t1) + d3 * (t0 * t1 + t0 * t2 + t1 * t2);
  c[2] = d2a - d3 * (t0 + t1 + t2);
  c[3] = d3;
  return c;
}

cplx poly_eval(const std::array<cplx, 4>& c, cplx t) { return ((c[3] * t + c[2]) * t + c[1]) * t + c[0]; }

// int_0^1 P(tau) / (tau - w) dtau
cplx panel_cauchy(const std::array<cplx, 4>& c, cplx w) {
  if (std::abs(w - 0.5) < 4.0) {
    const cplx q2 = c[3];
    const cplx q1 = c[2] + w * q2;
    const cplx q0 = c[1] + w * q1;
    const cplx rem = c[0] + w * q0;
    return q2 / 3.0 + q1 / 2.0 + q0 + rem * std::log((1.0 - w) / (-w));
  }
  static constexpr std::array<double, 4> node = {0.0694318442029737, 0.3300094782075719,
                                                 0.6699905217924281, 0.9305681557970263};
  static constexpr std::array<double, 4> weight = {0.1739274225687269, 0.3260725774312731,
                                                   0.3260725774312731, 0.1739274225687269};
  cplx s = 0.0;
  for (int k = 0; k < 4; ++k) s += weight[k] * poly_eval(c, node[k]) / (node[k] - w);
  return s;
}

}  // namespace

RVec cumulative_integral(std::span<const double> f, double h) { return cumulative_impl<double>(f, h); }
CVec cumulative_integral(std::span<const cplx> f, double h) { return cumulative_impl<cplx>(f, h); }

cplx pv_cauchy_integral(std::span<const cplx> f, const Grid1D& grid, cplx z) {
  const std::size_t n = grid.size();
  if (f.size() != n) throw std::invalid_argument("pv_cauchy_integral: sample/grid size mismatch");
  const double a = grid.x_min(), b = grid.x_max(), h = grid.h();
  if (z.imag() == 0.0 && z.real() >= a && z.real() <= b)
    throw std::domain_error("pv_cauchy_integral: z lies on the integration interval");

  const double dx = std::max({a - z.real(), 0.0, z.real() - b});
  const double dist = std::hypot(dx, z.imag());

  if (dist >= 10.0 * h || n < 4) {
    // Trapezoid with fourth-order endpoint correction -h^2/12 (g'(b) - g'(a)).
    CVec g(n);
    for (std::size_t i = 0; i < n; ++i) g[i] = f[i] / (grid[i] - z);
    cplx s = trapezoid(std::span<const cplx>(g), h);
    if (n >= 4) {
      const cplx ga = (-11.0 * g[0] + 18.0 * g[1] - 9.0 * g[2] + 2.0 * g[3]) / (6.0 * h);
      const cplx gb = (11.0 * g[n - 1] - 18.0 * g[n - 2] + 9.0 * g[n - 3] - 2.0 * g[n - 4]) / (6.0 * h);
      s -= h * h / 12.0 * (gb - ga);
    }
    return s;
  }

  cplx total = 0.0;
  for (std::size_t j = 0; j + 1 < n; ++j) {
    // Pick 4 consecutive samples around panel [j, j+1].
    std::size_t start = (j == 0) ? 0 : j - 1;
    if (start + 4 > n) start = n - 4;
    const int off = static_cast<int>(start) - static_cast<int>(j);
    const std::array<cplx, 4> v = {f[start], f[start + 1], f[start + 2], f[start + 3]};
    const auto c = cubic_coefficients(v, off);
    const cplx w = (z - grid[j]) / h;
    total += panel_cauchy(c, w);
  }
  return total;
}

// ---------------------------------------------------------------------------

CVec derivative_fd4(std::span<const cplx> f, double h) {
  const std::size_t n = f.size();
  if (n < 5) throw std::invalid_argument("derivative_fd4: need at least 5 samples");
  CVec d(n);
  for (std::size_t i = 2; i + 2 < n; ++i)
    d[i] = (f[i - 2] - 8.0 * f[i - 1] + 8.0 * f[i + 1] - f[i + 2]) / (12.0 * h);
  d[0] = (-25.0 * f[0] + 48.0 * f[1] - 36.0 * f[2] + 16.0 * f[3] - 3.0 * f[4]) / (12.0 * h);
  d[1] = (-3.0 * f[0] - 10.0 * f[1] + 18.0 * f[2] - 6.0 * f[3] + f[4]) / (12.0 * h);
  d[n - 1] = (25.0 * f[n - 1] - 48.0 * f[n - 2] + 36.0 * f[n - 3] - 16.0 * f[n - 4] + 3.0 * f[n - 5]) / (12.0 * h);
  d[n - 2] = (3.0 * f[n - 1] + 10.0 * f[n - 2] - 18.0 * f[n - 3] + 6.0 * f[n - 4] - f[n - 5]) / (12.0 * h);
  return d;
}

// ---------------------------------------------------------------------------

namespace {

Eigen::MatrixXcd to_eigen(const ComplexMatrix& a) {
  Eigen::MatrixXcd m(a.rows(), a.cols());
  for (std::size_t r = 0; r < a.rows(); ++r)
    for (std::size_t c = 0; c < a.cols(); ++c) m(r, c) = a(r, c);
  return m;
}

Eigen::PartialPivLU<Eigen::MatrixXcd> factorize(const ComplexMatrix& a, double rcond_min) {
  if (a.rows() != a.cols()) throw std::invalid_argument("solve_dense: matrix must be square");
  Eigen::PartialPivLU<Eigen::MatrixXcd> lu(to_eigen(a));
  const double rc = lu.rcond();
  if (!(rc >= rcond_min)) {
    throw SingularMatrixError("solve_dense: matrix is singular to working precision",
                              rc > 0.0 ? 1.0 / rc : std::numeric_limits<double>::infinity());
  }
  return lu;
}

}  // namespace

CVec solve_dense(const ComplexMatrix& a, std::span<const cplx> b, double rcond_min) {
  if (b.size() != a.rows()) throw std::invalid_argument("solve_dense: right-hand side size mismatch");
  if (a.rows() == 0) return {};
  auto lu = factorize(a, rcond_min);
  Eigen::VectorXcd rhs(b.size());
  for (std::size_t i = 0; i < b.size(); ++i) rhs(i) = b[i];
  Eigen::VectorXcd x = lu.solve(rhs);
  return CVec(x.data(), x.data() + x.size());
}

ComplexMatrix solve_dense(const ComplexMatrix& a, const ComplexMatrix& b, double rcond_min) {
  if (b.rows() != a.rows()) throw std::invalid_argument("solve_dense: right-hand side size mismatch");
  ComplexMatrix out(b.rows(), b.cols());
  if (a.rows() == 0) return out;
  auto lu = factorize(a, rcond_min);
  Eigen::MatrixXcd x = lu.solve(to_eigen(b));
  for (std::size_t r = 0; r < out.rows(); ++r)
    for (std::size_t c = 0; c < out.cols(); ++c) out(r, c) = x(r, c);
  return out;
}

// ---------------------------------------------------------------------------

cplx analytic_derivative(const AnalyticFn& f, cplx z, double h) {
  return (f(z + h) - f(z - h) - kI * f(z + kI * h) + kI * f(z - kI * h)) / (4.0 * h);
}

RootResult newton_refine(const AnalyticFn& f, cplx z0, double tol, int max_iter) {
  RootResult res{z0, std::abs(f(z0)), 0, false};
  cplx z = z0;
  for (int it = 1; it <= max_iter; ++it) {
    const cplx fz = f(z);
    const cplx dfz = analytic_derivative(f, z, 1e-4 * std::max(1.0, std::abs(z)));
    if (dfz == 0.0) break;
    const cplx step = fz / dfz;
    z -= step;
    res.iterations = it;
    if (std::abs(step) <= tol * std::max(1.0, std::abs(z))) {
      res.converged = true;
      break;
    }
  }
  res.z = z;
  res.residual = std::abs(f(z));
  return res;
}

}  // namespace csp
