#include "csp/asymptotics.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <limits>
#include <sstream>

namespace csp::asym {

using soliton::ConeSpec;
using soliton::PoleClass;

namespace {

using GK = boost::math::quadrature::gauss_kronrod<double, 15>;

double nu_of(const ScatteringData& d, double s) { return -std::log1p(std::norm(d.reflection(s))) / (2.0 * kPi); }

// Breakpoints: grid nodes strictly inside (a, b) plus the extras.
std::vector<double> panels(const RVec& nodes, double a, double b, std::initializer_list<double> extra) {
  std::vector<double> p{a, b};
  auto lo = std::upper_bound(nodes.begin(), nodes.end(), a);
  for (auto it = lo; it != nodes.end() && *it < b; ++it) p.push_back(*it);
  for (double e : extra)
    if (e > a && e < b) p.push_back(e);
  std::sort(p.begin(), p.end());
  p.erase(std::unique(p.begin(), p.end(), [](double u, double v) { return std::abs(u - v) < 1e-15; }), p.end());
  return p;
}

// Boost's adaptive GK scales its tolerance by the first estimate, which stalls
// on integrals that cancel to ~0. Refine against an absolute target instead.
// Pieces shorter than min_len are accepted as they are: near a removable
// singularity (nu(s) - nu(p))/(s - p) the estimate only sees rounding noise.
double refine(const std::function<double(double)>& f, double a, double b, double abs_tol, double min_len,
              int depth) {
  double err = 0.0, l1 = 0.0;
  const double v = GK::integrate(f, a, b, 0, 0.0, &err, &l1);
  err *= 0.5 * (b - a);  // reported on the reference interval
  if (err <= abs_tol || err <= 64.0 * std::numeric_limits<double>::epsilon() * l1 || depth <= 0 ||
      b - a < min_len)
    return v;
  const double m = 0.5 * (a + b);
  return refine(f, a, m, 0.5 * abs_tol, min_len, depth - 1) + refine(f, m, b, 0.5 * abs_tol, min_len, depth - 1);
}

double panel_integral(const std::function<double(double)>& f, const std::vector<double>& p, double tol,
                      int depth) {
  if (p.size() < 2) return 0.0;
  double l1 = 0.0;
  for (std::size_t i = 0; i + 1 < p.size(); ++i) {
    double err = 0.0, pl1 = 0.0;
    GK::integrate(f, p[i], p[i + 1], 0, 0.0, &err, &pl1);
    l1 += pl1;
  }
  const double total = p.back() - p.front();
  const double target = tol * std::max(l1, 1e-3);
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < p.size(); ++i)
    acc += refine(f, p[i], p[i + 1], target * (p[i + 1] - p[i]) / total, 1e-8 * total, depth);
  return acc;
}

Mat2 scaled(const Mat2& m, cplx s) { return {m.a * s, m.b * s, m.c * s, m.d * s}; }

Mat2 checked_inverse(const Mat2& m, const char* where) {
  const cplx det = m.det();
  if (!std::isfinite(std::abs(det)) || std::abs(det) < 1e-12)
    throw OuterModelSingular(std::string("outer model not invertible at ") + where);
  return m.inverse();
}

}  // namespace

PhaseContext phase_context(double y, double t) {
  if (t == 0.0) throw std::invalid_argument("phase_context: t must be nonzero");
  const double q = t / (4.0 * y);
  if (!(q > 0.0) || !std::isfinite(q)) {
    std::ostringstream os;
    os << "fast-decay region: t/(4y) = " << q << " at y = " << y << ", t = " << t;
    throw FastDecayRegion(os.str());
  }
  PhaseContext c;
  c.y = y;
  c.t = t;
  c.z0 = std::sqrt(q);
  c.eta = t > 0.0 ? 1 : -1;
  return c;
}

// ---------------------------------------------------------------------------

ConjugationData::ConjugationData(const ScatteringData& data, double z0, const ConjugationOptions& opts)
    : data_(&data), opts_(opts), z0_(z0) {
  if (!(z0 > 0.0)) throw std::invalid_argument("conjugation data: z0 must be positive");
  const RVec& g = data.z_grid;
  if (!data.reflectionless()) {
    if (g.size() < 4) throw InsufficientResolution("reflection grid has fewer than 4 samples");
    if (g.front() > -z0 || g.back() < z0) {
      std::ostringstream os;
      os << "reflection grid [" << g.front() << ", " << g.back() << "] does not cover [-z0, z0], z0 = " << z0;
      throw InsufficientResolution(os.str());
    }
    const double h = (g.back() - g.front()) / static_cast<double>(g.size() - 1);
    if (z0 < 3.0 * h) throw InsufficientResolution("z0 below three reflection grid spacings");
    const auto inside = static_cast<std::size_t>(std::count_if(g.begin(), g.end(), [&](double s) {
      return s >= -z0 && s <= z0;
    }));
    if (inside < opts.min_samples) {
      std::ostringstream os;
      os << inside << " reflection samples in [-z0, z0], " << opts.min_samples << " required";
      throw InsufficientResolution(os.str());
    }
  }
  for (const auto& p : data.poles)
    if (std::abs(p.z) < z0) inner_.push_back(p);

  nu_plus_ = nu(z0);
  nu_minus_ = nu(-z0);

  if (!data.reflectionless()) {
    // symmetric pairing keeps the integrands regular at s = 0
    const double nu0 = nu(0.0);
    int_nu_s2_ = integral([&](double s) { return (nu(s) + nu(-s) - 2.0 * nu0) / (s * s); }, 0.0, z0);
    const double i1 = integral([&](double s) { return (nu(s) - nu(-s)) / s; }, 0.0, z0);
    delta0_ = std::exp(kI * i1);

    const double jp = integral([&](double s) { return (nu(s) - nu_plus_) / (s - z0); }, -z0, z0);
    const double jm = integral([&](double s) { return (nu(s) - nu_minus_) / (s + z0); }, -z0, z0);
    t0_plus_ = std::exp(kI * (-nu_plus_ * std::log(2.0 * z0) + jp));
    t0_minus_ = std::exp(kI * (nu_minus_ * std::log(2.0 * z0) + jm) - kPi * nu_minus_);
  }
  for (const auto& p : inner_) {
    const cplx zc = std::conj(p.z);
    t0_plus_ *= (z0 - zc) / (z0 - p.z);
    t0_minus_ *= (-z0 - zc) / (-z0 - p.z);
  }
}

double ConjugationData::nu(double s) const { return nu_of(*data_, s); }

double ConjugationData::integral(const std::function<double(double)>& f, double a, double b) const {
  if (b <= a) return 0.0;
  return panel_integral(f, panels(data_->z_grid, a, b, {0.0}), opts_.quad_tol, opts_.max_depth);
}

cplx ConjugationData::cauchy(cplx z) const {
  if (data_->reflectionless()) return 0.0;
  const double x = z.real(), y = z.imag();
  const double x0 = std::clamp(x, -z0_, z0_);
  const double n0 = nu(x0);
  const auto p = panels(data_->z_grid, -z0_, z0_, {x0, 0.0});
  const double re = panel_integral(
      [&](double s) {
        const double d = s - x;
        return (nu(s) - n0) * d / (d * d + y * y);
      },
      p, opts_.quad_tol, opts_.max_depth);
  const double im = y == 0.0 ? 0.0
                             : panel_integral(
                                   [&](double s) {
                                     const double d = s - x;
                                     return (nu(s) - n0) * y / (d * d + y * y);
                                   },
                                   p, opts_.quad_tol, opts_.max_depth);
  const cplx lam = std::log(z - z0_) - std::log(z + z0_);
  return cplx(re, im) + n0 * lam;
}

cplx ConjugationData::delta(cplx z) const {
  if (z == cplx(0.0)) return delta0_;
  if (z.imag() == 0.0 && std::abs(z.real()) <= z0_)
    throw std::invalid_argument("delta: z on the jump interval; use delta_boundary");
  return std::exp(kI * cauchy(z));
}

cplx ConjugationData::delta_boundary(double s, int side) const {
  if (!(std::abs(s) < z0_)) throw std::invalid_argument("delta_boundary: s outside (-z0, z0)");
  if (data_->reflectionless()) return 1.0;
  const double ns = nu(s);
  const double pv = integral([&](double q) { return q == s ? 0.0 : (nu(q) - ns) / (q - s); }, -z0_, s) +
                    integral([&](double q) { return q == s ? 0.0 : (nu(q) - ns) / (q - s); }, s, z0_);
  const cplx lam = std::log((z0_ - s) / (z0_ + s)) + (side > 0 ? 1.0 : -1.0) * kI * kPi;
  return std::exp(kI * (pv + ns * lam));
}

cplx ConjugationData::T(cplx z) const {
  cplx acc = delta(z);
  for (const auto& p : inner_) acc *= (z - std::conj(p.z)) / (z - p.z);
  return acc;
}

cplx ConjugationData::T_boundary(double s, int side) const {
  cplx acc = delta_boundary(s, side);
  for (const auto& p : inner_) acc *= (s - std::conj(p.z)) / (s - p.z);
  return acc;
}

cplx ConjugationData::T0() const {
  cplx acc = delta0_;
  for (const auto& p : inner_) acc *= std::conj(p.z) / p.z;
  return acc;
}

cplx ConjugationData::T1() const {
  cplx acc = kI * int_nu_s2_;
  for (const auto& p : inner_) acc += -2.0 * kI * p.z.imag() / std::norm(p.z);
  return acc;
}

cplx ConjugationData::T1_literal() const {
  cplx acc = -int_nu_s2_;
  for (const auto& p : inner_) acc += 2.0 * p.z.imag() / p.z;
  return acc;
}

cplx ConjugationData::beta_phase(cplx z, int which) const {
  const double sp = which > 0 ? z0_ : -z0_;
  const double nsp = which > 0 ? nu_plus_ : nu_minus_;
  // characteristic function of the unit interval ending at the stationary point
  const double lo = which > 0 ? std::max(-z0_, z0_ - 1.0) : -z0_;
  const double hi = which > 0 ? z0_ : std::min(z0_, -z0_ + 1.0);
  auto chi = [&](double s) { return (s >= lo && s <= hi) ? 1.0 : 0.0; };
  cplx integral_part;
  if (z == cplx(sp)) {
    integral_part = integral([&](double s) { return (nu(s) - chi(s) * nsp) / (s - sp); }, -z0_, z0_);
  } else {
    const double x = z.real(), y = z.imag();
    const double re = integral(
        [&](double s) {
          const double d = s - x;
          return (nu(s) - chi(s) * nsp) * d / (d * d + y * y);
        },
        -z0_, z0_);
    const double im = integral(
        [&](double s) {
          const double d = s - x;
          return (nu(s) - chi(s) * nsp) * y / (d * d + y * y);
        },
        -z0_, z0_);
    integral_part = cplx(re, im);
  }
  return -nsp * std::log(z - sp + 1.0) + integral_part;
}

ConjugationData conjugation_data(const ScatteringData& data, const PhaseContext& ctx,
                                 const ConjugationOptions& opts) {
  return ConjugationData(data, ctx.z0, opts);
}

// ---------------------------------------------------------------------------

double pc_nu(cplx r0) { return -std::log1p(std::norm(r0)) / (2.0 * kPi); }

std::pair<cplx, cplx> pc_betas(cplx r0) {
  if (r0 == cplx(0.0)) return {0.0, 0.0};
  const double nu = pc_nu(r0);
  const double amp = std::sqrt(2.0 * kPi) * std::exp(-kPi * nu / 2.0);
  const cplx b12 = amp * std::exp(kI * (kPi / 4.0)) * reciprocal_gamma(-kI * nu) / r0;
  const cplx b21 = -amp * std::exp(-kI * (kPi / 4.0)) * reciprocal_gamma(kI * nu) / std::conj(r0);
  return {b12, b21};
}

PCCoefficients pc_coefficients(const PhaseContext& ctx, const ConjugationData& cj, const ScatteringData& data,
                               FormulaVariant variant) {
  PCCoefficients pc;
  pc.variant = variant;
  const double z0 = ctx.z0, t = ctx.t;
  const double lt = std::log(t / (z0 * z0 * z0));
  const cplx rp = data.reflection(z0);
  const cplx rm = data.reflection(-z0);
  const double nup = cj.nu_plus(), num = cj.nu_minus();

  if (variant == FormulaVariant::Derived) {
    const cplx tp = cj.T0_plus();
    const cplx tm = cj.T0_minus() * std::exp(kPi * num);  // unimodular part
    pc.r0_plus = rp / (tp * tp) * std::exp(kI * (nup * lt + t / z0));
    pc.r0_minus = -std::conj(rm) * tm * tm * std::exp(kI * (num * lt + t / z0));
  } else {
    const cplx tp = std::exp(kI * cj.beta_phase(z0, +1));
    const cplx tm = std::exp(kI * cj.beta_phase(-z0, -1));
    cplx pp = 1.0, pm = 1.0;
    for (const auto& p : cj.delta_plus()) {
      pp *= (z0 - std::conj(p.z)) / (z0 - p.z);
      pm *= (-z0 - std::conj(p.z)) / (-z0 - p.z);
    }
    const cplx dp = pp * tp, dm = pm * tm;
    pc.r0_plus = rp / (dp * dp) * std::exp(kI * (2.0 * nup * lt + t / (z0 * z0)));
    pc.r0_minus = std::conj(rm) / (1.0 + std::norm(rm)) * dm * dm * std::exp(kI * (2.0 * num * lt + t / (z0 * z0)));
  }
  pc.nu_plus = pc_nu(pc.r0_plus);
  pc.nu_minus = pc_nu(pc.r0_minus);
  std::tie(pc.beta12_plus, pc.beta21_plus) = pc_betas(pc.r0_plus);
  std::tie(pc.beta12_minus, pc.beta21_minus) = pc_betas(pc.r0_minus);

  pc.M1_plus = {0.0, -pc.beta21_plus, pc.beta12_plus, 0.0};
  if (variant == FormulaVariant::Derived)
    pc.M1_minus = {0.0, -pc.beta12_minus, pc.beta21_minus, 0.0};
  else
    pc.M1_minus = {0.0, pc.beta12_minus, -pc.beta21_minus, 0.0};
  return pc;
}

EExpansion e_expansion(const MatrixFn& out_model, const PCCoefficients& pc, const PhaseContext& ctx) {
  const double z0 = ctx.z0, t = ctx.t;
  const Mat2 mp = out_model(z0), mm = out_model(-z0);
  const Mat2 mpi = checked_inverse(mp, "+z0"), mmi = checked_inverse(mm, "-z0");
  const cplx s0 = std::sqrt(z0 / t) / kI;
  const cplx s1 = 1.0 / (kI * std::sqrt(z0 * t));
  EExpansion e;
  if (pc.variant == FormulaVariant::Derived) {
    const Mat2 ap = mp * pc.M1_plus * mpi;
    const Mat2 am = mm * pc.M1_minus * mmi;
    e.E0 = Mat2::identity() + scaled(am - ap, s0);
    e.E1 = scaled(ap + am, -s1);
  } else {
    const Mat2 ap = mpi * pc.M1_plus * mp;
    const Mat2 am = mmi * pc.M1_minus * mm;
    e.E0 = Mat2::identity() + scaled(ap - am, s0);
    e.E1 = scaled(ap + am, s1);
  }
  return e;
}

// ---------------------------------------------------------------------------

cplx exp_d(const ScatteringData& data) {
  cplx acc = soliton::exp_d(data.poles);
  if (data.reflectionless()) return acc;
  const RVec& g = data.z_grid;
  const double lo = g.front(), hi = g.back();
  const double sym = std::min(-lo, hi);
  auto nu = [&](double s) { return nu_of(data, s); };
  auto integ = [&](const std::function<double(double)>& f, double a, double b) {
    if (b <= a) return 0.0;
    return panel_integral(f, panels(g, a, b, {}), 1e-12, 30);
  };
  double total = 0.0;
  if (sym > 0.0) total += integ([&](double s) { return (nu(s) - nu(-s)) / s; }, 0.0, sym);
  if (hi > sym) total += integ([&](double s) { return nu(s) / s; }, std::max(sym, 0.0), hi);
  if (-lo > sym) total += integ([&](double s) { return nu(s) / s; }, lo, -std::max(sym, 0.0));
  return acc * std::exp(-kI * total);
}

TheoremEvaluator::TheoremEvaluator(const ConeSpec& cone, const ScatteringData& data, double t,
                                   const TheoremOptions& opts)
    : cone_(cone), data_(&data), t_(t), opts_(opts) {
  cone.validate();
  if (!(t > 0.0)) throw std::invalid_argument("theorem formula: only t > 0 is implemented");
  filtered_ = soliton::cone_filter(data.poles, cone);
  exp_d_full_ = exp_d(data);
  if (t < opts.t_min) {
    std::ostringstream os;
    os << "t = " << t << " below t_min = " << opts.t_min << "; expansion not meaningful";
    warnings_.push_back(os.str());
  }
  for (const auto& w : filtered_.warnings) warnings_.push_back(w);
  if (std::isfinite(filtered_.mu)) {
    std::ostringstream os;
    os << "excluded poles contribute O(exp(-" << filtered_.mu << " t)) to the error budget";
    warnings_.push_back(os.str());
  }
}

void TheoremEvaluator::warn(const std::string& w) const {
  std::lock_guard lock(mu_);
  if (std::find(warnings_.begin(), warnings_.end(), w) == warnings_.end()) warnings_.push_back(w);
}

std::size_t TheoremEvaluator::cache_size() const {
  std::lock_guard lock(mu_);
  return cache_.size();
}

std::shared_ptr<const ConjugationData> TheoremEvaluator::conjugation(double z0) const {
  const long long key = std::llround(z0 * 1e6);
  {
    std::lock_guard lock(mu_);
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;
  }
  auto cj = std::make_shared<const ConjugationData>(*data_, static_cast<double>(key) * 1e-6, opts_.conjugation);
  std::lock_guard lock(mu_);
  return cache_.emplace(key, cj).first->second;
}

AsymptoticSample TheoremEvaluator::at_y(double y) const {
  const PhaseContext ctx = phase_context(y, t_);
  const auto cj = conjugation(ctx.z0);
  const double t = t_;

  AsymptoticSample s;
  s.y = y;
  s.t = t;
  s.z0 = ctx.z0;
  s.error_order = 1.0 / t;

  // outer model: poles of I with constants carrying delta^{-2}
  soliton::SolitonEnsemble outer = filtered_.inside;
  outer.mode = soliton::SplitMode::Auto;
  for (auto& p : outer.poles) {
    const cplx d = cj->delta(p.z);
    p.c /= d * d;
  }
  std::optional<soliton::RhpSolution> sol;
  soliton::ZeroLimit lim;
  if (outer.size() > 0) {
    sol = soliton::solve_rhp(outer, y, t);
    lim = soliton::zero_limit_exact(outer, y, t);
    if (sol->clamped()) warn("outer model exponent clamped");
  }
  auto out_model = [&](cplx z) { return sol ? (*sol)(z) : Mat2::identity(); };

  const PCCoefficients pc = pc_coefficients(ctx, *cj, *data_, opts_.variant);
  const EExpansion ex = e_expansion(out_model, pc, ctx);
  const cplx e2d = exp_d_full_ * exp_d_full_;

  if (opts_.variant == FormulaVariant::Derived) {
    const Mat2 n0 = sol ? sol->unrenormalized(0.0) : Mat2::identity();
    const Mat2 f = checked_inverse(n0, "0") * ex.E1 * n0;
    cplx b0 = cj->delta0();
    cplx b1 = kI * cj->int_nu_over_s2();
    for (const auto& p : filtered_.faster) {
      b0 *= std::conj(p.z) / p.z;
      b1 += -2.0 * kI * p.z.imag() / std::norm(p.z);
    }
    s.u_leading = e2d * b0 * b0 * lim.u_raw;
    s.correction = e2d * b0 * b0 * f.b / kI;
    s.u = s.u_leading + s.correction;
    s.shift_T1 = -(b1 / kI).real();
    s.shift_f11 = (f.a / kI).real();
    s.x = y + lim.c_plus + s.shift_T1 + s.shift_f11;
  } else {
    const Mat2 m0 = out_model(0.0);
    const Mat2 g = checked_inverse(m0, "0") * ex.E1 * m0;  // E1 already carries 1/(i sqrt(z0 t))
    const cplx f12 = g.b * std::sqrt(t);
    const cplx f11 = g.a * std::sqrt(t);
    // literal soliton term keeps c_k(I) without the delta factors
    soliton::ZeroLimit lit;
    cplx ed_inside = 1.0;
    if (filtered_.inside.size() > 0) {
      lit = soliton::zero_limit_exact(filtered_.inside, y, t);
      ed_inside = soliton::exp_d(filtered_.inside.poles);
    }
    const cplx t0 = cj->T0();
    const cplx t1 = cj->T1_literal();
    s.u_leading = e2d * ed_inside * ed_inside * lit.u_raw * t0 * t0 * (1.0 + t1);
    s.correction = -e2d * kI * f12 / std::sqrt(t);
    s.u = s.u_leading + s.correction;
    cplx shift_t1 = 0.0;
    if (std::abs(t1) < 1e-12)
      warn("|T1| < 1e-12: the -i/T1 shift is omitted");
    else
      shift_t1 = kI / t1;
    const cplx shift_f = kI * f11 / std::sqrt(t);
    if (std::abs(shift_t1.imag() + shift_f.imag()) > 1e-8) warn("literal hodograph shift has an imaginary part; real part used");
    s.shift_T1 = shift_t1.real();
    s.shift_f11 = shift_f.real();
    s.x = y + lit.c_plus + s.shift_T1 + s.shift_f11;
  }
  return s;
}

std::vector<AsymptoticSample> theorem_formula(const ConeSpec& cone, const ScatteringData& data, const RVec& x_grid,
                                              double t, const TheoremOptions& opts,
                                              std::vector<std::string>* warnings) {
  const TheoremEvaluator ev(cone, data, t, opts);
  double y_lo = cone.y1 - cone.v2 * t;
  const double y_hi = cone.y2 - cone.v1 * t;
  if (y_lo <= 0.0) {
    y_lo = std::max(1e-3 * t, 1e-6);
    if (warnings) warnings->push_back("cone slice reaches y <= 0; clipped to the oscillatory region");
  }
  if (!(y_hi > y_lo)) return {};
  const double z0max = std::sqrt(t / (4.0 * y_lo));
  double dy = opts.y_step > 0.0 ? opts.y_step : std::min(0.05, kPi / (16.0 * z0max));
  const double margin = 4.0 * dy;
  const double a = std::max(y_lo - margin, 0.5 * y_lo), b = y_hi + margin;
  const auto ny = static_cast<std::size_t>(std::ceil((b - a) / dy)) + 1;
  dy = (b - a) / static_cast<double>(ny - 1);

  RVec ys(ny), xs(ny);
  std::vector<std::string> errors(ny);
#pragma omp parallel for schedule(dynamic, 8)
  for (std::size_t i = 0; i < ny; ++i) {
    ys[i] = a + dy * static_cast<double>(i);
    try {
      xs[i] = ev.at_y(ys[i]).x;
    } catch (const std::exception& e) {
      errors[i] = e.what();
    }
  }
  for (const auto& e : errors)
    if (!e.empty()) throw NumericalError("theorem formula: " + e);
  for (std::size_t i = 1; i < ny; ++i)
    if (!(xs[i] > xs[i - 1])) throw NumericalError("theorem formula: x(y) not increasing; loop profile in the cone");

  RVec xq;
  for (double x : x_grid)
    if (x >= xs.front() && x <= xs.back()) xq.push_back(x);
  const RVec y0 = soliton::inverse_map(ys, xs, xq);

  std::vector<AsymptoticSample> out(xq.size());
  std::vector<char> keep(xq.size(), 0);
#pragma omp parallel for schedule(dynamic, 8)
  for (std::size_t j = 0; j < xq.size(); ++j) {
    try {
      double y = y0[j];
      AsymptoticSample s = ev.at_y(y);
      for (int it = 0; it < 30 && std::abs(s.x - xq[j]) > 1e-12 * std::max(1.0, std::abs(xq[j])); ++it) {
        // slope of the sampled map as the Newton derivative
        auto k = static_cast<std::size_t>(std::clamp((y - a) / dy, 0.0, static_cast<double>(ny - 2)));
        const double slope = (xs[k + 1] - xs[k]) / dy;
        y -= (s.x - xq[j]) / slope;
        s = ev.at_y(y);
      }
      s.x = xq[j];
      if (cone.contains(s.y, t)) {
        out[j] = s;
        keep[j] = 1;
      }
    } catch (const std::exception& e) {
      errors[0] = e.what();
    }
  }
  if (!errors[0].empty()) throw NumericalError("theorem formula: " + errors[0]);
  std::vector<AsymptoticSample> res;
  for (std::size_t j = 0; j < out.size(); ++j)
    if (keep[j]) res.push_back(out[j]);
  if (warnings)
    for (const auto& w : ev.warnings()) warnings->push_back(w);
  return res;
}

}  // namespace csp::asym
