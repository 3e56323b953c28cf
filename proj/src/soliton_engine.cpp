#include "csp/soliton_engine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/math/special_functions/fpclassify.hpp>  // pchip.hpp in 1.74 needs isnan in scope
#include <boost/math/interpolators/pchip.hpp>

namespace csp::soliton {

namespace {

constexpr double kExponentCap = 700.0;

// d/dz log((z - zk)/(z - conj(zk))) at z = 0
cplx log_derivative_at_zero(cplx zk) { return 2.0 * kI * zk.imag() / std::norm(zk); }

}  // namespace

void SolitonEnsemble::validate() const {
  for (std::size_t k = 0; k < poles.size(); ++k) {
    if (!(poles[k].z.imag() > 0.0)) throw std::invalid_argument("soliton ensemble: pole off the upper half plane");
    if (poles[k].c == 0.0) throw std::invalid_argument("soliton ensemble: zero norming constant");
    for (std::size_t j = 0; j < k; ++j)
      if (std::abs(poles[k].z - poles[j].z) < 1e-12) throw std::invalid_argument("soliton ensemble: coincident poles");
  }
  if (mode == SplitMode::Explicit && split.size() != poles.size())
    throw std::invalid_argument("soliton ensemble: split size does not match pole count");
}

cplx phase_exponent(cplx z, double y, double t) { return 2.0 * kI * (z * y + t / (4.0 * z)); }

std::vector<bool> resolve_split(const SolitonEnsemble& e, double y, double t) {
  const std::size_t n = e.size();
  switch (e.mode) {
    case SplitMode::None: return std::vector<bool>(n, false);
    case SplitMode::All: return std::vector<bool>(n, true);
    case SplitMode::Explicit: return e.split;
    case SplitMode::Auto: break;
  }
  std::vector<bool> s(n);
  for (std::size_t k = 0; k < n; ++k) s[k] = phase_exponent(e.poles[k].z, y, t).real() > 0.0;
  return s;
}

cplx partial_s22(const std::vector<PoleDatum>& poles, const std::vector<bool>& split, cplx z) {
  cplx acc = 1.0;
  for (std::size_t k = 0; k < poles.size(); ++k)
    if (split[k]) acc *= (z - poles[k].z) / (z - std::conj(poles[k].z));
  return acc;
}

cplx partial_s22_derivative(const std::vector<PoleDatum>& poles, const std::vector<bool>& split, cplx z) {
  // at a zero of the product only that factor's derivative survives
  for (std::size_t k = 0; k < poles.size(); ++k) {
    if (split[k] && z == poles[k].z) {
      cplx acc = 1.0 / (z - std::conj(poles[k].z));
      for (std::size_t j = 0; j < poles.size(); ++j)
        if (j != k && split[j]) acc *= (z - poles[j].z) / (z - std::conj(poles[j].z));
      return acc;
    }
  }
  cplx logd = 0.0;
  for (std::size_t k = 0; k < poles.size(); ++k)
    if (split[k]) logd += 1.0 / (z - poles[k].z) - 1.0 / (z - std::conj(poles[k].z));
  return partial_s22(poles, split, z) * logd;
}

RenormalizedConstants renormalized_constants(const SolitonEnsemble& e, double y, double t) {
  RenormalizedConstants rc;
  rc.split = resolve_split(e, y, t);
  rc.gamma.resize(e.size());
  for (std::size_t k = 0; k < e.size(); ++k) {
    const auto& p = e.poles[k];
    cplx ex = phase_exponent(p.z, y, t);
    if (!rc.split[k]) {
      if (std::abs(ex.real()) > kExponentCap) {
        ex.real(std::copysign(kExponentCap, ex.real()));
        rc.clamped = true;
      }
      const cplx s = partial_s22(e.poles, rc.split, p.z);
      rc.gamma[k] = p.c * s * s * std::exp(ex);
    } else {
      if (std::abs(ex.real()) > kExponentCap) {
        ex.real(std::copysign(kExponentCap, ex.real()));
        rc.clamped = true;
      }
      const cplx sd = partial_s22_derivative(e.poles, rc.split, p.z);
      rc.gamma[k] = std::exp(-ex) / (p.c * sd * sd);
    }
  }
  return rc;
}

RhpSolution solve_rhp(const SolitonEnsemble& e, double y, double t) {
  e.validate();
  RhpSolution sol;
  const std::size_t n = e.size();
  const auto rc = renormalized_constants(e, y, t);
  sol.split_ = rc.split;
  sol.clamped_ = rc.clamped;
  sol.poles_.resize(n);
  for (std::size_t k = 0; k < n; ++k) sol.poles_[k] = e.poles[k].z;
  if (n == 0) return sol;

  // unknowns: P_1..P_N then Q_1..Q_N, one system per row of M
  ComplexMatrix a = ComplexMatrix::identity(2 * n);
  ComplexMatrix rhs(2 * n, 2);
  for (std::size_t k = 0; k < n; ++k) {
    const cplx zk = sol.poles_[k], zkc = std::conj(zk);
    const cplx g = rc.gamma[k], gc = std::conj(g);
    const bool sk = rc.split[k];
    for (std::size_t l = 0; l < n; ++l) {
      const cplx zl = sol.poles_[l], zlc = std::conj(zl);
      const bool sl = rc.split[l];
      // P_k equation: residue vector times the regular column at z_k
      if (!sk) {
        if (!sl) a(k, n + l) -= g / (zk - zlc);
        else a(k, l) -= g / (zk - zl);
      } else {
        if (!sl) a(k, l) -= g / (zk - zl);
        else a(k, n + l) -= g / (zk - zlc);
      }
      // Q_k equation at conj(z_k)
      if (!sk) {
        if (!sl) a(n + k, l) += gc / (zkc - zl);
        else a(n + k, n + l) += gc / (zkc - zlc);
      } else {
        if (!sl) a(n + k, n + l) += gc / (zkc - zlc);
        else a(n + k, l) += gc / (zkc - zl);
      }
    }
    if (!sk) {
      rhs(k, 0) = g;
      rhs(n + k, 1) = -gc;
    } else {
      rhs(k, 1) = g;
      rhs(n + k, 0) = -gc;
    }
    // keep rows O(1) when |gamma| is large
    const double scale = 1.0 / std::max(1.0, std::abs(g));
    for (std::size_t c = 0; c < 2 * n; ++c) {
      a(k, c) *= scale;
      a(n + k, c) *= scale;
    }
    for (std::size_t c = 0; c < 2; ++c) {
      rhs(k, c) *= scale;
      rhs(n + k, c) *= scale;
    }
  }
  const ComplexMatrix x = solve_dense(a, rhs, 1e-15);
  sol.p_.resize(n);
  sol.q_.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    sol.p_[k] = {x(k, 0), x(k, 1)};
    sol.q_[k] = {x(n + k, 0), x(n + k, 1)};
  }
  return sol;
}

Mat2 RhpSolution::operator()(cplx z) const {
  Mat2 m = Mat2::identity();
  for (std::size_t k = 0; k < poles_.size(); ++k) {
    const cplx wp = 1.0 / (z - poles_[k]);
    const cplx wq = 1.0 / (z - std::conj(poles_[k]));
    const auto& p = p_[k];
    const auto& q = q_[k];
    if (!split_[k]) {
      m.b += p[0] * wp;
      m.d += p[1] * wp;
      m.a += q[0] * wq;
      m.c += q[1] * wq;
    } else {
      m.a += p[0] * wp;
      m.c += p[1] * wp;
      m.b += q[0] * wq;
      m.d += q[1] * wq;
    }
  }
  return m;
}

Mat2 RhpSolution::unrenormalized(cplx z) const {
  cplx sd = 1.0;
  for (std::size_t k = 0; k < poles_.size(); ++k)
    if (split_[k]) sd *= (z - poles_[k]) / (z - std::conj(poles_[k]));
  const Mat2 m = (*this)(z);
  return {m.a * sd, m.b / sd, m.c * sd, m.d / sd};
}

Mat2 RhpSolution::derivative(cplx z) const {
  Mat2 m = Mat2::zero();
  for (std::size_t k = 0; k < poles_.size(); ++k) {
    const cplx dp = -1.0 / ((z - poles_[k]) * (z - poles_[k]));
    const cplx zc = std::conj(poles_[k]);
    const cplx dq = -1.0 / ((z - zc) * (z - zc));
    const auto& p = p_[k];
    const auto& q = q_[k];
    if (!split_[k]) {
      m.b += p[0] * dp;
      m.d += p[1] * dp;
      m.a += q[0] * dq;
      m.c += q[1] * dq;
    } else {
      m.a += p[0] * dp;
      m.c += p[1] * dp;
      m.b += q[0] * dq;
      m.d += q[1] * dq;
    }
  }
  return m;
}

std::vector<Mat2> solve_reflectionless_rhp(const SolitonEnsemble& e, double y, double t,
                                           const std::vector<cplx>& z_eval) {
  const RhpSolution s = solve_rhp(e, y, t);
  std::vector<Mat2> out;
  out.reserve(z_eval.size());
  for (cplx z : z_eval) {
    for (const auto& p : e.poles)
      if (std::abs(z - p.z) < 1e-14 || std::abs(z - std::conj(p.z)) < 1e-14)
        throw std::invalid_argument("solve_reflectionless_rhp: evaluation point on a pole");
    out.push_back(s(z));
  }
  return out;
}

namespace {

// Refer limits of a renormalised problem back to the plain one.
ZeroLimit unrenormalise(const SolitonEnsemble& e, const std::vector<bool>& split, cplx lim12, cplx lim11) {
  ZeroLimit out;
  const cplx s0 = partial_s22(e.poles, split, 0.0);
  cplx logd = 0.0;
  for (std::size_t k = 0; k < e.size(); ++k)
    if (split[k]) logd += log_derivative_at_zero(e.poles[k].z);
  out.u_raw = lim12 / (s0 * s0);
  out.c_plus = (lim11 + logd / kI).real();
  return out;
}

}  // namespace

ZeroLimit zero_limit(const SolitonEnsemble& e, double y, double t, const LimitOptions& opts) {
  if (e.size() == 0) return {};
  const RhpSolution s = solve_rhp(e, y, t);
  const Mat2 m0inv = s(0.0).inverse();
  auto f = [&](cplx z) {
    const Mat2 r = m0inv * s(z);
    return std::array<cplx, 2>{r.b / (kI * z), (r.a - 1.0) / (kI * z)};
  };
  double eps = opts.epsilon;
  ZeroLimit best;
  for (int attempt = 0; attempt <= opts.max_halvings; ++attempt) {
    const auto a1 = f(kI * eps), a2 = f(-kI * eps), b1 = f(2.0 * kI * eps), b2 = f(-2.0 * kI * eps);
    std::array<cplx, 2> two, four;
    for (int j = 0; j < 2; ++j) {
      two[j] = 0.5 * (a1[j] + a2[j]);
      const cplx wide = 0.5 * (b1[j] + b2[j]);
      four[j] = (4.0 * two[j] - wide) / 3.0;
    }
    best = unrenormalise(e, s.split(), four[0], four[1]);
    best.epsilon_used = eps;
    const double gap = std::max(std::abs(four[0] - two[0]), std::abs(four[1] - two[1]));
    best.converged = gap <= opts.agreement;
    if (best.converged) break;
    eps *= 0.5;
  }
  return best;
}

ZeroLimit zero_limit_exact(const SolitonEnsemble& e, double y, double t) {
  if (e.size() == 0) return {};
  const RhpSolution s = solve_rhp(e, y, t);
  const Mat2 r = s(0.0).inverse() * s.derivative(0.0);
  ZeroLimit out = unrenormalise(e, s.split(), r.b / kI, r.a / kI);
  return out;
}

cplx exp_d(const std::vector<PoleDatum>& poles) {
  cplx acc = 1.0;
  for (const auto& p : poles) acc *= p.z / std::conj(p.z);
  return acc;
}

namespace {

SolitonField allocate_field(const RVec& y_grid, double t, cplx ed) {
  SolitonField f;
  f.t = t;
  f.y = y_grid;
  f.u_of_y.resize(y_grid.size());
  f.x_of_y.resize(y_grid.size());
  f.d_phase = 1.0 / (ed * ed);
  return f;
}

void field_point(const SolitonEnsemble& e, SolitonField& f, std::size_t i, cplx e2d, const LimitOptions& opts,
                 std::vector<char>& flags) {
  const ZeroLimit lim = zero_limit(e, f.y[i], f.t, opts);
  f.u_of_y[i] = e2d * lim.u_raw;
  f.x_of_y[i] = f.y[i] + lim.c_plus;
  flags[i] = lim.converged ? 0 : 1;
}

void collect_flags(SolitonField& f, const std::vector<char>& flags) {
  const auto bad = std::count(flags.begin(), flags.end(), 1);
  if (bad > 0)
    f.warnings.push_back("z -> 0 extrapolation did not settle at " + std::to_string(bad) + " y samples");
}

}  // namespace

SolitonField reconstruct_u(const SolitonEnsemble& e, const RVec& y_grid, double t, const LimitOptions& opts) {
  e.validate();
  const cplx ed = exp_d(e.poles);
  SolitonField f = allocate_field(y_grid, t, ed);
  std::vector<char> flags(y_grid.size(), 0);
  const long n = static_cast<long>(y_grid.size());
#pragma omp parallel for schedule(static)
  for (long i = 0; i < n; ++i) field_point(e, f, static_cast<std::size_t>(i), ed * ed, opts, flags);
  collect_flags(f, flags);
  return f;
}

SolitonField reconstruct_u_serial(const SolitonEnsemble& e, const RVec& y_grid, double t, const LimitOptions& opts) {
  e.validate();
  const cplx ed = exp_d(e.poles);
  SolitonField f = allocate_field(y_grid, t, ed);
  std::vector<char> flags(y_grid.size(), 0);
  for (std::size_t i = 0; i < y_grid.size(); ++i) field_point(e, f, i, ed * ed, opts, flags);
  collect_flags(f, flags);
  return f;
}

HodographEvaluator soliton_evaluator(const SolitonEnsemble& e, double t) {
  const cplx ed = exp_d(e.poles);
  return [e, t, e2d = ed * ed](double y) {
    const ZeroLimit lim = zero_limit(e, y, t);
    return HodographSample{y + lim.c_plus, e2d * lim.u_raw};
  };
}

namespace {

void check_monotone(const RVec& y, const RVec& x) {
  if (y.size() != x.size() || y.size() < 4) throw std::invalid_argument("hodograph: need at least 4 samples");
  for (std::size_t i = 0; i + 1 < x.size(); ++i)
    if (!(x[i + 1] > x[i]) || !(y[i + 1] > y[i]))
      throw NumericalError("hodograph: x(y) not strictly increasing near y = " + std::to_string(y[i]));
}

}  // namespace

RVec inverse_map(const RVec& y, const RVec& x_of_y, const RVec& x_query) {
  check_monotone(y, x_of_y);
  boost::math::interpolators::pchip<RVec> inv{RVec(x_of_y), RVec(y)};
  RVec out(x_query.size());
  const double lo_shift = x_of_y.front() - y.front(), hi_shift = x_of_y.back() - y.back();
  for (std::size_t i = 0; i < x_query.size(); ++i) {
    const double x = x_query[i];
    if (x < x_of_y.front()) out[i] = x - lo_shift;
    else if (x > x_of_y.back()) out[i] = x - hi_shift;
    else out[i] = inv(x);
  }
  return out;
}

CVec invert_hodograph(SolitonField& f, const RVec& x_grid, const HodographEvaluator* exact, double tol) {
  check_monotone(f.y, f.x_of_y);
  const RVec y0 = inverse_map(f.y, f.x_of_y, x_grid);
  CVec u(x_grid.size());
  if (exact == nullptr) {
    RVec re(f.y.size()), im(f.y.size());
    for (std::size_t i = 0; i < f.y.size(); ++i) {
      re[i] = f.u_of_y[i].real();
      im[i] = f.u_of_y[i].imag();
    }
    boost::math::interpolators::pchip<RVec> pre{RVec(f.y), std::move(re)};
    boost::math::interpolators::pchip<RVec> pim{RVec(f.y), std::move(im)};
    for (std::size_t i = 0; i < x_grid.size(); ++i) {
      const double yy = y0[i];
      if (yy < f.y.front() || yy > f.y.back()) u[i] = yy < f.y.front() ? f.u_of_y.front() : f.u_of_y.back();
      else u[i] = {pre(yy), pim(yy)};
    }
  } else {
    boost::math::interpolators::pchip<RVec> fwd{RVec(f.y), RVec(f.x_of_y)};
    std::size_t stalled = 0;
    for (std::size_t i = 0; i < x_grid.size(); ++i) {
      double yy = y0[i];
      HodographSample s = (*exact)(yy);
      int it = 0;
      while (std::abs(s.x - x_grid[i]) > tol && it++ < 30) {
        double slope = 1.0;
        if (yy > f.y.front() && yy < f.y.back()) slope = std::max(1.0, fwd.prime(yy));
        yy -= (s.x - x_grid[i]) / slope;
        s = (*exact)(yy);
      }
      if (std::abs(s.x - x_grid[i]) > 1e3 * tol) ++stalled;
      u[i] = s.u;
    }
    if (stalled > 0)
      f.warnings.push_back("hodograph Newton polish stalled at " + std::to_string(stalled) + " points");
  }
  f.x_grid = x_grid;
  f.u_of_x = u;
  return u;
}

CVec soliton_profile(const SolitonEnsemble& e, const Grid1D& x_grid, double t) {
  double c_total = 0.0;
  for (const auto& p : e.poles) c_total += 2.0 * p.z.imag() / std::norm(p.z);
  const std::size_t n = std::max<std::size_t>(x_grid.size(), 64);
  const double y_lo = x_grid.x_min() - c_total - 1.0, y_hi = x_grid.x_max() + 1.0;
  RVec y(n);
  for (std::size_t i = 0; i < n; ++i) y[i] = y_lo + (y_hi - y_lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  SolitonField f = reconstruct_u(e, y, t);
  const HodographEvaluator ev = soliton_evaluator(e, t);
  return invert_hodograph(f, x_grid.points(), &ev);
}

// ---------------------------------------------------------------------------

void ConeSpec::validate() const {
  if (!(std::isfinite(y1) && std::isfinite(y2) && std::isfinite(v1) && std::isfinite(v2)))
    throw std::invalid_argument("cone: non-finite parameter");
  if (y1 > y2) throw std::invalid_argument("cone: need y1 <= y2");
  if (!(v1 <= v2 && v2 < 0.0)) throw std::invalid_argument("cone: need v1 <= v2 < 0");
  if (v1 == v2) throw std::invalid_argument("cone: v1 = v2 leaves the annulus I empty");
}

bool ConeSpec::contains(double y, double t) const {
  if (t <= 0.0) return y >= y1 && y <= y2;
  return y >= y1 - v2 * t && y <= y2 - v1 * t;
}

double annulus_distance(cplx z, const ConeSpec& cone) {
  const double r = std::abs(z);
  return std::max({0.0, r - std::sqrt(cone.outer_radius_sq()), std::sqrt(cone.inner_radius_sq()) - r});
}

ConeFilterResult cone_filter(const std::vector<PoleDatum>& poles, const ConeSpec& cone) {
  cone.validate();
  ConeFilterResult out;
  out.inside.mode = SplitMode::Auto;
  const double rin2 = cone.inner_radius_sq(), rout2 = cone.outer_radius_sq();
  const double tie = 1e-12 * rout2;
  for (const auto& p : poles) {
    const double r2 = std::norm(p.z);
    PoleClass cls = PoleClass::Inside;
    if (r2 < rin2 - tie) cls = PoleClass::Faster;
    else if (r2 > rout2 + tie) cls = PoleClass::Slower;
    else if (std::abs(r2 - rin2) <= tie || std::abs(r2 - rout2) <= tie)
      out.warnings.push_back("pole on the boundary of I classified inside; the decay rate vanishes");
    out.classes.push_back(cls);
    if (cls == PoleClass::Faster) out.faster.push_back(p);
  }
  for (std::size_t k = 0; k < poles.size(); ++k) {
    if (out.classes[k] != PoleClass::Inside) continue;
    cplx c = poles[k].c;
    for (const auto& f : out.faster) {
      const cplx ratio = (poles[k].z - f.z) / (poles[k].z - std::conj(f.z));
      c *= ratio * ratio;
    }
    out.inside.poles.push_back({poles[k].z, c});
    out.inside_index.push_back(k);
  }
  out.mu = std::numeric_limits<double>::infinity();
  const double inner_term = 1.0 / (2.0 * std::sqrt(-cone.v1));
  for (std::size_t k = 0; k < poles.size(); ++k) {
    if (out.classes[k] == PoleClass::Inside) continue;
    const cplx z = poles[k].z;
    const double r = std::abs(z);
    const double val = z.imag() * (-cone.v2 / (r * r)) * (r + inner_term) * annulus_distance(z, cone);
    out.mu = std::min(out.mu, val);
  }
  return out;
}

ZeroLimit cone_field(const ConeFilterResult& filtered, double y, double t, const LimitOptions& opts) {
  ZeroLimit lim = zero_limit(filtered.inside, y, t, opts);
  cplx b0 = 1.0;
  double shift = 0.0;
  for (const auto& f : filtered.faster) {
    b0 *= f.z / std::conj(f.z);
    shift += 2.0 * f.z.imag() / std::norm(f.z);
  }
  lim.u_raw /= b0 * b0;
  lim.c_plus += shift;
  return lim;
}

}  // namespace csp::soliton
