#include "csp/lax_scattering.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include "csp/fft.hpp"

namespace csp::scatter {

namespace {

// value at x_i + theta h from four neighbouring samples, stencil clamped at the ends
cplx interp_offset(const CVec& f, std::size_t i, double theta) {
  const std::size_t n = f.size();
  std::size_t base = (i == 0) ? 0 : i - 1;
  if (base + 4 > n) base = n - 4;
  const double s = theta + static_cast<double>(i) - static_cast<double>(base);  // position within stencil
  cplx acc = 0.0;
  for (int a = 0; a < 4; ++a) {
    double w = 1.0;
    for (int b = 0; b < 4; ++b)
      if (a != b) w *= (s - b) / static_cast<double>(a - b);
    acc += w * f[base + a];
  }
  return acc;
}

Mat2 commutator(const Mat2& x, const Mat2& y) { return x * y - y * x; }

// Sixth-order Magnus exponent over cell i (Gauss nodes 3i .. 3i+2).
Mat2 magnus_exponent(const std::vector<LaxNode>& nodes, std::size_t i, cplx z, double h) {
  const Mat2 k1 = lax_generator(nodes[3 * i], z);
  const Mat2 k2 = lax_generator(nodes[3 * i + 1], z);
  const Mat2 k3 = lax_generator(nodes[3 * i + 2], z);
  const Mat2 a1 = cplx(h) * k2;
  const Mat2 a2 = cplx(std::sqrt(15.0) * h / 3.0) * (k3 - k1);
  const Mat2 a3 = cplx(10.0 * h / 3.0) * (k3 - 2.0 * k2 + k1);
  const Mat2 c1 = commutator(a1, a2);
  const Mat2 c2 = cplx(-1.0 / 60.0) * commutator(a1, 2.0 * a3 + c1);
  return a1 + cplx(1.0 / 12.0) * a3 +
         cplx(1.0 / 240.0) * commutator(-20.0 * a1 - a3 + c1, a2 + c2);
}

double gauss_cell(double f1, double f2, double f3, double h) { return h * (5.0 * f1 + 8.0 * f2 + 5.0 * f3) / 18.0; }

void check_exponent(const Potential& p, cplx z, double cap) {
  const double span = p.p().back() - p.p().front();
  if (std::abs(z.imag()) * span > cap)
    throw NumericalError("eigenfunction propagation: |Im z| * p-span = " +
                         std::to_string(std::abs(z.imag()) * span) + " exceeds cap");
}

// mu_hat_minus at x_max, full matrix.
Mat2 mu_hat_minus_end(const Potential& p, cplx z) {
  const auto& nodes = p.nodes();
  const auto& dp = p.dp();
  const double h = p.grid().h();
  Mat2 mu = Mat2::identity();
  for (std::size_t i = 0; i + 1 < p.size(); ++i) {
    const Mat2 e = expm_traceless(magnus_exponent(nodes, i, z, h));
    const cplx ph = std::exp(-kI * z * dp[i]);
    mu = e * mu;
    mu.a *= ph;
    mu.c *= ph;
    mu.b /= ph;
    mu.d /= ph;
  }
  return mu;
}

void check_decay(const CVec& u, double threshold) {
  const double edge = std::max(std::abs(u.front()), std::abs(u.back()));
  if (edge > threshold)
    throw NumericalError("build_potential: non-decaying potential, |u| = " + std::to_string(edge) +
                         " at the grid boundary");
}

}  // namespace

LaxNode lax_node(cplx w, cplx wx) {
  const double m = 1.0 + std::norm(w);
  const double s = std::sqrt(m);
  LaxNode node;
  node.sqrt_m = s;
  node.a11 = kI * (std::imag(std::conj(w) * wx) / (2.0 * s * (s + 1.0)));
  node.a21 = -((s + 1.0) * std::conj(wx) - std::conj(w) * std::conj(w) * wx / (s + 1.0)) / (4.0 * m);
  return node;
}

LaxNode lax_node_tangent(double a, cplx omega, double a_s, cplx omega_s, double speed) {
  if (a <= -1.0 + 1e-12) throw NumericalError("lax_node_tangent: tangent points straight backwards");
  const double k = std::sqrt(0.5 * (1.0 + a));
  const double k_s = a_s / (4.0 * k);
  const cplx b = std::conj(omega) / (2.0 * k);
  const cplx b_s = std::conj(omega_s) / (2.0 * k) - std::conj(omega) * k_s / (2.0 * k * k);
  LaxNode node;
  node.sqrt_m = speed;
  node.a11 = -kI * std::imag(std::conj(b) * b_s);
  node.a21 = b * k_s - k * b_s;
  return node;
}

Mat2 lax_generator(const LaxNode& node, cplx z) {
  const cplx diag = kI * z * node.sqrt_m + node.a11;
  return {diag, -std::conj(node.a21), node.a21, -diag};
}

Mat2 gauge_matrix(cplx w) {
  const double s = std::sqrt(1.0 + std::norm(w));
  const double k = std::sqrt((s + 1.0) / (2.0 * s));
  const cplx b = k * std::conj(w) / (s + 1.0);
  return {k, -std::conj(b), b, k};
}

namespace {

// Integrals over the cells shared by both builders.
void finish_cells(Potential& p, std::vector<LaxNode>& nodes, RVec& dp, RVec& c_plus, CVec& d_minus, CVec& d_plus,
                  cplx& d, double& c_total, double h) {
  const std::size_t n = p.size();
  dp.resize(n - 1);
  d_minus.assign(n, 0.0);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const auto& g1 = nodes[3 * i];
    const auto& g2 = nodes[3 * i + 1];
    const auto& g3 = nodes[3 * i + 2];
    dp[i] = gauss_cell(g1.sqrt_m, g2.sqrt_m, g3.sqrt_m, h);
    d_minus[i + 1] = d_minus[i] + kI * gauss_cell(g1.a11.imag(), g2.a11.imag(), g3.a11.imag(), h);
  }
  d = d_minus.back();
  d_plus.resize(n);
  for (std::size_t i = 0; i < n; ++i) d_plus[i] = d - d_minus[i];
  if (c_plus.empty()) {
    c_plus.assign(n, 0.0);
    for (std::size_t i = n - 1; i-- > 0;) c_plus[i] = c_plus[i + 1] + (dp[i] - h);
  }
  c_total = c_plus.front();
}

}  // namespace

Potential Potential::build(const ComplexField1D& u0, const PotentialOptions& opts) {
  const std::size_t n = u0.grid.size();
  if (u0.values.size() != n) throw std::invalid_argument("build_potential: sample count does not match grid");
  if (n < 8) throw std::invalid_argument("build_potential: need at least 8 samples");
  check_decay(u0.values, opts.decay_threshold);

  Potential p;
  p.grid_ = u0.grid;
  p.u_ = u0.values;
  const double h = p.grid_.h();

  std::array<CVec, 3> w_at, wx_at;
  if (opts.derivative == DerivativeMethod::Spectral) {
    p.ux_ = spectral_derivative(p.u_, h, 1);
    p.uxx_ = spectral_derivative(p.u_, h, 2);
    for (int j = 0; j < 3; ++j) {
      w_at[j] = spectral_derivative(p.u_, h, 1, kGaussNodes[j] * h);
      wx_at[j] = spectral_derivative(p.u_, h, 2, kGaussNodes[j] * h);
    }
  } else {
    p.ux_ = derivative_fd4(p.u_, h);
    p.uxx_ = derivative_fd4(p.ux_, h);
    for (int j = 0; j < 3; ++j) {
      w_at[j].resize(n - 1);
      wx_at[j].resize(n - 1);
      for (std::size_t i = 0; i + 1 < n; ++i) {
        w_at[j][i] = interp_offset(p.ux_, i, kGaussNodes[j]);
        wx_at[j][i] = interp_offset(p.uxx_, i, kGaussNodes[j]);
      }
    }
  }

  p.m_.resize(n);
  for (std::size_t i = 0; i < n; ++i) p.m_[i] = 1.0 + std::norm(p.ux_[i]);
  p.nodes_.resize(3 * (n - 1));
  for (std::size_t i = 0; i + 1 < n; ++i)
    for (int j = 0; j < 3; ++j) p.nodes_[3 * i + j] = lax_node(w_at[j][i], wx_at[j][i]);

  finish_cells(p, p.nodes_, p.dp_, p.c_plus_, p.d_minus_, p.d_plus_, p.d_, p.c_total_, h);
  p.p_.resize(n);
  for (std::size_t i = 0; i < n; ++i) p.p_[i] = p.grid_[i] - p.c_plus_[i];
  return p;
}

Potential Potential::build_parametric(const Grid1D& y_grid, const RVec& x_of_y, const CVec& u_of_y,
                                      double decay_threshold) {
  const std::size_t n = y_grid.size();
  if (x_of_y.size() != n || u_of_y.size() != n)
    throw std::invalid_argument("build_parametric: sample count does not match grid");
  if (n < 8) throw std::invalid_argument("build_parametric: need at least 8 samples");
  check_decay(u_of_y, decay_threshold);

  Potential p;
  p.parametric_ = true;
  p.grid_ = y_grid;
  p.u_ = u_of_y;
  const double h = y_grid.h();

  // x - y falls from c to 0; remove a smooth step so the remainder is periodic
  const double c = x_of_y.front() - y_grid.x_min();
  const double mid = 0.5 * (y_grid.x_min() + y_grid.x_max());
  auto step = [&](double y, int order) {
    const double th = std::tanh(y - mid), sech2 = 1.0 - th * th;
    if (order == 0) return 0.5 * c * (1.0 - th);
    if (order == 1) return -0.5 * c * sech2;
    return c * sech2 * th;
  };
  CVec rem(n);
  for (std::size_t i = 0; i < n; ++i) rem[i] = x_of_y[i] - y_grid[i] - step(y_grid[i], 0);

  p.ux_ = spectral_derivative(p.u_, h, 1);
  p.uxx_ = spectral_derivative(p.u_, h, 2);
  p.m_.resize(n);
  p.c_plus_.resize(n);
  for (std::size_t i = 0; i < n; ++i) p.c_plus_[i] = x_of_y[i] - y_grid[i];
  const CVec rem1 = spectral_derivative(rem, h, 1);
  for (std::size_t i = 0; i < n; ++i) {
    const double xy = 1.0 + rem1[i].real() + step(y_grid[i], 1);
    // dy/dx = sqrt(m) with m = 1 + |u_x|^2; in the curve form m = 1 / x_y^2
    p.m_[i] = xy != 0.0 ? 1.0 / (xy * xy) : std::numeric_limits<double>::infinity();
  }

  p.nodes_.resize(3 * (n - 1));
  for (int j = 0; j < 3; ++j) {
    const double shift = kGaussNodes[j] * h;
    const CVec w = spectral_derivative(p.u_, h, 1, shift), ws = spectral_derivative(p.u_, h, 2, shift);
    const CVec r1 = spectral_derivative(rem, h, 1, shift), r2 = spectral_derivative(rem, h, 2, shift);
    for (std::size_t i = 0; i + 1 < n; ++i) {
      const double y = y_grid[i] + shift;
      double a = 1.0 + r1[i].real() + step(y, 1);
      double a_s = r2[i].real() + step(y, 2);
      cplx om = w[i], om_s = ws[i];
      // renormalise the sampled tangent to unit length
      const double len = std::sqrt(a * a + std::norm(om));
      const double len_s = (a * a_s + std::real(std::conj(om) * om_s)) / len;
      a_s = (a_s - a * len_s / len) / len;
      om_s = (om_s - om * len_s / len) / len;
      a /= len;
      om /= len;
      p.nodes_[3 * i + j] = lax_node_tangent(a, om, a_s, om_s, 1.0);
    }
  }

  finish_cells(p, p.nodes_, p.dp_, p.c_plus_, p.d_minus_, p.d_plus_, p.d_, p.c_total_, h);
  p.p_ = y_grid.points();
  return p;
}

EigenPair integrate_eigenfunctions(const Potential& p, cplx z, const IntegrationOptions& opts) {
  check_exponent(p, z, opts.exponent_cap);
  const std::size_t n = p.size();
  const auto& nodes = p.nodes();
  const auto& dp = p.dp();
  const double h = p.grid().h();

  std::vector<Mat2> steps(n - 1);
  std::vector<cplx> phase(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    steps[i] = expm_traceless(magnus_exponent(nodes, i, z, h));
    phase[i] = std::exp(-kI * z * dp[i]);
  }

  EigenPair out;
  out.z = z;
  out.mu_minus.resize(n);
  out.mu_plus.resize(n);

  Mat2 mu = Mat2::identity();
  out.mu_minus[0] = mu;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    mu = steps[i] * mu;
    mu.a *= phase[i];
    mu.c *= phase[i];
    mu.b /= phase[i];
    mu.d /= phase[i];
    out.mu_minus[i + 1] = mu;
  }

  const cplx ed = std::exp(p.d());
  mu = {ed, 0.0, 0.0, 1.0 / ed};
  out.mu_plus[n - 1] = mu;
  for (std::size_t i = n - 1; i-- > 0;) {
    mu = steps[i].inverse() * mu;
    mu.a /= phase[i];
    mu.c /= phase[i];
    mu.b *= phase[i];
    mu.d *= phase[i];
    out.mu_plus[i] = mu;
  }

  // undo the e^{D sigma3} gauge
  for (std::size_t i = 0; i < n; ++i) {
    const cplx e = std::exp(p.d_minus()[i]);
    for (auto* m : {&out.mu_minus[i], &out.mu_plus[i]}) {
      m->a /= e;
      m->b /= e;
      m->c *= e;
      m->d *= e;
    }
  }
  return out;
}

std::vector<std::array<cplx, 2>> mu_minus_column2(const Potential& p, cplx z) {
  const std::size_t n = p.size();
  const auto& nodes = p.nodes();
  const auto& dp = p.dp();
  const double h = p.grid().h();
  std::vector<std::array<cplx, 2>> out(n);
  cplx v0 = 0.0, v1 = 1.0;
  out[0] = {v0, v1};
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const Mat2 e = expm_traceless(magnus_exponent(nodes, i, z, h));
    const cplx ph = std::exp(kI * z * dp[i]);
    const cplx w0 = (e.a * v0 + e.b * v1) * ph;
    const cplx w1 = (e.c * v0 + e.d * v1) * ph;
    v0 = w0;
    v1 = w1;
    out[i + 1] = {v0, v1};
  }
  for (std::size_t i = 0; i < n; ++i) {
    const cplx e = std::exp(p.d_minus()[i]);
    out[i][0] /= e;
    out[i][1] *= e;
  }
  return out;
}

std::vector<std::array<cplx, 2>> mu_plus_column1(const Potential& p, cplx z) {
  const std::size_t n = p.size();
  const auto& nodes = p.nodes();
  const auto& dp = p.dp();
  const double h = p.grid().h();
  std::vector<std::array<cplx, 2>> out(n);
  cplx v0 = std::exp(p.d()), v1 = 0.0;
  out[n - 1] = {v0, v1};
  for (std::size_t i = n - 1; i-- > 0;) {
    const Mat2 e = expm_traceless(-1.0 * magnus_exponent(nodes, i, z, h));
    const cplx ph = std::exp(kI * z * dp[i]);
    const cplx w0 = (e.a * v0 + e.b * v1) * ph;
    const cplx w1 = (e.c * v0 + e.d * v1) * ph;
    v0 = w0;
    v1 = w1;
    out[i] = {v0, v1};
  }
  for (std::size_t i = 0; i < n; ++i) {
    const cplx e = std::exp(p.d_minus()[i]);
    out[i][0] /= e;
    out[i][1] *= e;
  }
  return out;
}

cplx s22(const Potential& p, cplx z) {
  const auto& nodes = p.nodes();
  const auto& dp = p.dp();
  const double h = p.grid().h();
  cplx v0 = 0.0, v1 = 1.0;
  for (std::size_t i = 0; i + 1 < p.size(); ++i) {
    const Mat2 e = expm_traceless(magnus_exponent(nodes, i, z, h));
    const cplx ph = std::exp(kI * z * dp[i]);
    const cplx w0 = (e.a * v0 + e.b * v1) * ph;
    v1 = (e.c * v0 + e.d * v1) * ph;
    v0 = w0;
  }
  return std::exp(kI * p.d().imag()) * v1;
}

Mat2 scattering_matrix_at(const Potential& p, double z) {
  const Mat2 mu = mu_hat_minus_end(p, z);
  const cplx ed = std::exp(kI * p.d().imag());
  const double pmax = p.p().back();
  const cplx osc = std::exp(2.0 * kI * z * pmax);
  return {mu.a / ed, mu.b / ed / osc, mu.c * ed * osc, mu.d * ed};
}

namespace {

void fill_sample(ScatteringSamples& s, std::size_t i, const Mat2& m) {
  s.s11[i] = m.a;
  s.s12[i] = m.b;
  s.s21[i] = m.c;
  s.s22[i] = m.d;
  s.r[i] = m.b / m.d;
}

void compute_sample(const Potential& p, ScatteringSamples& s, std::size_t i, double half_window) {
  const double z = s.z_grid[i];
  if (std::abs(z) < half_window) return;  // filled afterwards
  try {
    const Mat2 m = scattering_matrix_at(p, z);
    if (!std::isfinite(m.max_abs())) throw NumericalError("non-finite scattering matrix");
    fill_sample(s, i, m);
  } catch (const std::exception& e) {
    s.errors[i] = e.what();
    const double nan = std::nan("");
    fill_sample(s, i, {cplx(nan, nan), cplx(nan, nan), cplx(nan, nan), cplx(nan, nan)});
  }
}

ScatteringSamples allocate(const RVec& z_grid) {
  ScatteringSamples s;
  s.z_grid = z_grid;
  const std::size_t n = z_grid.size();
  s.s11.resize(n);
  s.s12.resize(n);
  s.s21.resize(n);
  s.s22.resize(n);
  s.r.resize(n);
  s.errors.assign(n, "");
  return s;
}

// Samples inside the z = 0 window: cubic through two good neighbours per side.
void fill_zero_window(const Potential& p, ScatteringSamples& s, double half_window) {
  const std::size_t n = s.z_grid.size();
  std::vector<std::size_t> good;
  for (std::size_t i = 0; i < n; ++i)
    if (std::abs(s.z_grid[i]) >= half_window && s.errors[i].empty()) good.push_back(i);
  for (std::size_t i = 0; i < n; ++i) {
    const double z = s.z_grid[i];
    if (std::abs(z) >= half_window) continue;
    std::vector<std::size_t> left, right;
    for (auto g : good) (s.z_grid[g] < z ? left : right).push_back(g);
    if (left.size() < 2 || right.size() < 2) {
      // one-sided grid: evaluate directly, the window only protects S assembly
      fill_sample(s, i, scattering_matrix_at(p, z));
      continue;
    }
    std::sort(left.begin(), left.end(), [&](auto a, auto b) { return s.z_grid[a] > s.z_grid[b]; });
    std::sort(right.begin(), right.end(), [&](auto a, auto b) { return s.z_grid[a] < s.z_grid[b]; });
    const std::array<std::size_t, 4> idx{left[1], left[0], right[0], right[1]};
    auto lagrange = [&](const CVec& f) {
      cplx acc = 0.0;
      for (int a = 0; a < 4; ++a) {
        double w = 1.0;
        for (int b = 0; b < 4; ++b)
          if (a != b) w *= (z - s.z_grid[idx[b]]) / (s.z_grid[idx[a]] - s.z_grid[idx[b]]);
        acc += w * f[idx[a]];
      }
      return acc;
    };
    Mat2 m{lagrange(s.s11), lagrange(s.s12), lagrange(s.s21), lagrange(s.s22)};
    fill_sample(s, i, m);
  }
}

}  // namespace

ScatteringSamples scattering_matrix(const Potential& p, const RVec& z_grid, const ScatteringOptions& opts) {
  ScatteringSamples s = allocate(z_grid);
  const double half = 0.5 * opts.zero_window;
  const long n = static_cast<long>(z_grid.size());
#pragma omp parallel for schedule(dynamic, 4)
  for (long i = 0; i < n; ++i) compute_sample(p, s, static_cast<std::size_t>(i), half);
  fill_zero_window(p, s, half);
  return s;
}

ScatteringSamples scattering_matrix_serial(const Potential& p, const RVec& z_grid, const ScatteringOptions& opts) {
  ScatteringSamples s = allocate(z_grid);
  const double half = 0.5 * opts.zero_window;
  for (std::size_t i = 0; i < z_grid.size(); ++i) compute_sample(p, s, i, half);
  fill_zero_window(p, s, half);
  return s;
}

// ---------------------------------------------------------------------------

namespace {

struct ArgTracker {
  const AnalyticFn& f;
  int depth_limit = 12;

  // accumulated arg change of f along the segment a -> b
  double segment(cplx a, cplx fa, cplx b, cplx fb, int depth) const {
    const double step = std::arg(fb / fa);
    if (std::abs(step) < kPi / 4.0 || depth >= depth_limit) return step;
    const cplx mid = 0.5 * (a + b);
    const cplx fm = f(mid);
    return segment(a, fa, mid, fm, depth + 1) + segment(mid, fm, b, fb, depth + 1);
  }
};

cplx box_point(const SearchBox& b, std::size_t k, std::size_t per_edge) {
  const double s = static_cast<double>(k % per_edge) / static_cast<double>(per_edge);
  switch (k / per_edge) {
    case 0: return {b.re_min + s * (b.re_max - b.re_min), b.im_min};
    case 1: return {b.re_max, b.im_min + s * (b.im_max - b.im_min)};
    case 2: return {b.re_max - s * (b.re_max - b.re_min), b.im_max};
    default: return {b.re_min, b.im_max - s * (b.im_max - b.im_min)};
  }
}

bool inside(const SearchBox& b, cplx z, double slack) {
  return z.real() >= b.re_min - slack && z.real() <= b.re_max + slack && z.imag() >= b.im_min - slack &&
         z.imag() <= b.im_max + slack;
}

void search(const AnalyticFn& f, const SearchBox& box, const ZeroSearchOptions& opts, int depth,
            ZeroSearchResult& out) {
  const int count = winding_number(f, box, opts.edge_samples);
  if (count <= 0) {
    if (count < 0) out.warnings.push_back("negative winding count on a sub-rectangle (pole inside?)");
    return;
  }
  const cplx centre{0.5 * (box.re_min + box.re_max), 0.5 * (box.im_min + box.im_max)};
  const double size = std::max(box.re_max - box.re_min, box.im_max - box.im_min);
  if (count == 1 || depth >= opts.max_depth) {
    RootResult r = newton_refine(f, centre, opts.newton_tol, opts.newton_max_iter);
    if (r.converged && inside(box, r.z, 1e-9 * size)) {
      out.zeros.push_back(r);
      if (count > 1) out.warnings.push_back("multiple zeros unresolved at maximum depth");
      return;
    }
    if (depth >= opts.max_depth) {
      r.converged = false;
      out.zeros.push_back(r);
      out.warnings.push_back("Newton stagnated; zero reported with residual " + std::to_string(r.residual));
      return;
    }
  }
  // split slightly off-centre so that symmetric zeros do not land on the cut
  const double xs = box.re_min + 0.5123 * (box.re_max - box.re_min);
  const double ys = box.im_min + 0.4871 * (box.im_max - box.im_min);
  const SearchBox quads[4] = {{box.re_min, xs, box.im_min, ys},
                              {xs, box.re_max, box.im_min, ys},
                              {box.re_min, xs, ys, box.im_max},
                              {xs, box.re_max, ys, box.im_max}};
  for (const auto& q : quads) search(f, q, opts, depth + 1, out);
}

}  // namespace

int winding_number(const AnalyticFn& f, const SearchBox& box, std::size_t edge_samples) {
  const std::size_t total = 4 * edge_samples;
  std::vector<cplx> pts(total + 1), vals(total + 1);
  for (std::size_t k = 0; k < total; ++k) {
    pts[k] = box_point(box, k, edge_samples);
    vals[k] = f(pts[k]);
    if (vals[k] == 0.0 || !std::isfinite(std::abs(vals[k])))
      throw NumericalError("winding_number: zero or non-finite value on the contour");
  }
  pts[total] = pts[0];
  vals[total] = vals[0];
  ArgTracker tracker{f};
  double acc = 0.0;
  for (std::size_t k = 0; k < total; ++k) acc += tracker.segment(pts[k], vals[k], pts[k + 1], vals[k + 1], 0);
  return static_cast<int>(std::lround(acc / (2.0 * kPi)));
}

ZeroSearchResult find_zeros(const AnalyticFn& f, const SearchBox& box, const ZeroSearchOptions& opts) {
  ZeroSearchResult out;
  out.winding_count = winding_number(f, box, opts.edge_samples);
  if (out.winding_count == 0) return out;
  search(f, box, opts, 0, out);
  // drop duplicates from neighbouring rectangles
  std::vector<RootResult> unique;
  for (const auto& r : out.zeros) {
    bool dup = false;
    for (const auto& u : unique) dup = dup || std::abs(u.z - r.z) < 1e-8;
    if (!dup) unique.push_back(r);
  }
  out.zeros = unique;
  if (static_cast<int>(out.zeros.size()) != out.winding_count)
    out.warnings.push_back("winding count " + std::to_string(out.winding_count) + " but " +
                           std::to_string(out.zeros.size()) + " zeros refined");
  return out;
}

cplx connection_constant(const Potential& p, cplx zk, double central_window) {
  const auto minus = mu_minus_column2(p, zk);
  const auto plus = mu_plus_column1(p, zk);
  const std::size_t n = p.size();
  const auto lo = static_cast<std::size_t>(std::floor(n * (0.5 - 0.5 * central_window)));
  const auto hi = static_cast<std::size_t>(std::ceil(n * (0.5 + 0.5 * central_window)));
  // weighted least squares for mu_minus,2 = b * (e^{2 i z p} mu_plus,1)
  cplx num = 0.0;
  double den = 0.0;
  for (std::size_t i = lo; i < std::min(hi, n); ++i) {
    const cplx e = std::exp(2.0 * kI * zk * p.p()[i]);
    const cplx q0 = e * plus[i][0], q1 = e * plus[i][1];
    num += std::conj(q0) * minus[i][0] + std::conj(q1) * minus[i][1];
    den += std::norm(q0) + std::norm(q1);
  }
  if (!(den > 0.0)) throw NumericalError("connection_constant: degenerate eigenfunctions");
  return num / den;
}

DiscreteSpectrum find_discrete_spectrum(const Potential& p, const SearchBox& box, const SpectrumOptions& opts) {
  SearchBox b = box;
  if (b.im_min < opts.rho_min) b.im_min = opts.rho_min;
  if (b.im_max <= b.im_min || b.re_max <= b.re_min) throw std::invalid_argument("find_discrete_spectrum: empty box");

  const AnalyticFn f = [&p](cplx z) { return s22(p, z); };
  const ZeroSearchResult zs = find_zeros(f, b, opts.search);

  DiscreteSpectrum out;
  out.winding_count = zs.winding_count;
  out.warnings = zs.warnings;
  for (const auto& r : zs.zeros) {
    DiscretePole pole;
    pole.z = r.z;
    pole.residual = r.residual;
    pole.converged = r.converged;
    pole.s22_prime = analytic_derivative(f, r.z);
    pole.b = connection_constant(p, r.z, opts.central_window);
    pole.c = pole.b / pole.s22_prime;
    out.poles.push_back(pole);
  }
  std::sort(out.poles.begin(), out.poles.end(),
            [](const auto& a, const auto& c) { return a.z.real() < c.z.real(); });
  return out;
}

// ---------------------------------------------------------------------------

ConservedQuantities conserved_quantities(const Potential& p) {
  ConservedQuantities q;
  if (p.parametric()) {
    // x-densities are undefined once x(y) folds; only the total shift survives
    q.I0 = p.c();
    q.literal_formula = false;
    q.warnings.push_back("curve-form potential: only I0 is available");
    return q;
  }
  const std::size_t n = p.size();
  const double h = p.grid().h();
  RVec f0(n);
  for (std::size_t i = 0; i < n; ++i) f0[i] = std::sqrt(p.m()[i]) - 1.0;
  q.I0 = trapezoid(std::span<const double>(f0), h);

  // literal densities, with a skip rule where u_xx vanishes
  double scale = 0.0;
  for (const auto& v : p.uxx()) scale = std::max(scale, std::abs(v));
  const double guard = 1e-10 * std::max(1.0, scale);
  std::vector<bool> skip(n, false);
  CVec ratio(n, 0.0), f1(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const cplx ux = p.ux()[i], uxx = p.uxx()[i];
    const double m = p.m()[i], s = std::sqrt(m);
    if (std::abs(uxx) <= guard) {
      skip[i] = true;
      ++q.skipped_points;
      continue;
    }
    ratio[i] = ux / uxx;
    f1[i] = -(ratio[i] * (s - 1.0)) / (2.0 * s) - (std::conj(ux) * uxx + ux * std::conj(uxx)) / (4.0 * m);
  }
  const CVec f1x = derivative_fd4(f1, h);
  CVec f2(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    if (skip[i]) {
      f1[i] = 0.0;
      continue;
    }
    const double s = std::sqrt(p.m()[i]);
    f2[i] = -(ratio[i] * f1[i] - f1x[i] - f1[i] * f1[i]) / (2.0 * s);
  }
  q.I1 = trapezoid(std::span<const cplx>(f1), h);
  q.I2 = trapezoid(std::span<const cplx>(f2), h);
  if (q.skipped_points > 0)
    q.warnings.push_back("literal F1/F2 densities skipped at " + std::to_string(q.skipped_points) +
                         " points where u_xx vanishes");
  return q;
}

}  // namespace csp::scatter
