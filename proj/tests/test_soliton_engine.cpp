#include <doctest.h>

#include <random>

#include "csp/soliton_engine.hpp"

using namespace csp;
using namespace csp::soliton;

namespace {

SolitonEnsemble ensemble(std::vector<PoleDatum> poles, SplitMode mode = SplitMode::Auto) {
  SolitonEnsemble e;
  e.poles = std::move(poles);
  e.mode = mode;
  return e;
}

// One pole by hand elimination: column 2 has residue gamma * column 1 at z1,
// column 1 has residue -conj(gamma) * column 2 at conj(z1).
struct OnePole {
  cplx z1, gamma;
  std::array<cplx, 2> p, q;  // residue vectors at z1 and conj(z1)

  OnePole(cplx z, cplx c, double y, double t) : z1(z) {
    gamma = c * std::exp(2.0 * kI * (z * y + t / (4.0 * z)));
    const cplx delta = z1 - std::conj(z1);
    const double g2 = std::norm(gamma);
    const cplx den = 1.0 - g2 / (delta * delta);
    p = {gamma / den, -g2 / delta / den};
    q = {std::conj(gamma) * p[0] / delta, -std::conj(gamma) + std::conj(gamma) * p[1] / delta};
  }
  Mat2 operator()(cplx z) const {
    const cplx wq = 1.0 / (z - std::conj(z1)), wp = 1.0 / (z - z1);
    return Mat2{1.0 + q[0] * wq, p[0] * wp, q[1] * wq, 1.0 + p[1] * wp};
  }
  // (M(0)^{-1} M'(0))_12 / i
  cplx u_raw() const {
    const Mat2 m0 = (*this)(0.0);
    const cplx zb = std::conj(z1);
    const Mat2 dm{-q[0] / (zb * zb), -p[0] / (z1 * z1), -q[1] / (zb * zb), -p[1] / (z1 * z1)};
    return (m0.inverse() * dm)(0, 1) / kI;
  }
};

Mat2 sigma2_conj(const Mat2& m) {
  return Mat2{std::conj(m(1, 1)), -std::conj(m(1, 0)), -std::conj(m(0, 1)), std::conj(m(0, 0))};
}

RVec linspace(double a, double b, std::size_t n) {
  RVec x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
  return x;
}

}  // namespace

TEST_CASE("no poles gives the identity and the zero field") {
  const SolitonEnsemble e;
  const auto m = solve_reflectionless_rhp(e, 0.3, 1.0, {cplx(0.5, 0.5), cplx(-2.0, 0.1)});
  for (const auto& v : m) CHECK((v - Mat2::identity()).max_abs() == 0.0);
  const RVec y = linspace(-5.0, 5.0, 21);
  const SolitonField f = reconstruct_u(e, y, 2.0);
  for (std::size_t i = 0; i < y.size(); ++i) {
    CHECK(f.u_of_y[i] == cplx(0.0));
    CHECK(f.x_of_y[i] == doctest::Approx(y[i]).epsilon(1e-14));
  }
  SolitonField g = f;
  const RVec xq{-3.0, 0.1, 4.5};
  const CVec u = invert_hodograph(g, xq);
  for (const auto& v : u) CHECK(v == cplx(0.0));
}

TEST_CASE("one pole at z = i against hand elimination") {
  const OnePole oracle(kI, 1.0, 0.0, 0.0);
  // closed form for gamma = 1: P = (4/5, 2i/5), Q = (-2i/5, -4/5)
  CHECK(std::abs(oracle.p[0] - 0.8) < 1e-15);
  CHECK(std::abs(oracle.p[1] - cplx(0.0, 0.4)) < 1e-15);
  CHECK(std::abs(oracle.q[0] - cplx(0.0, -0.4)) < 1e-15);
  CHECK(std::abs(oracle.q[1] + 0.8) < 1e-15);

  const SolitonEnsemble e = ensemble({{kI, 1.0}}, SplitMode::None);
  for (cplx z : {cplx(0.5, 0.7), cplx(-1.2, -0.3), cplx(3.0, 0.0)}) {
    const Mat2 m = solve_reflectionless_rhp(e, 0.0, 0.0, {z})[0];
    CHECK((m - oracle(z)).max_abs() < 1e-12);
  }
}

TEST_CASE("one pole at general (y, t) against hand elimination") {
  const cplx z1(0.4, 0.7), c1(0.6, -0.3);
  const SolitonEnsemble e = ensemble({{z1, c1}}, SplitMode::None);
  for (double y : {-2.0, 0.0, 1.5}) {
    const OnePole oracle(z1, c1, y, 0.8);
    const RhpSolution s = solve_rhp(e, y, 0.8);
    CHECK((s(cplx(0.1, 0.2)) - oracle(cplx(0.1, 0.2))).max_abs() < 1e-12);
    CHECK(std::abs(zero_limit_exact(e, y, 0.8).u_raw - oracle.u_raw()) < 1e-12);
  }
}

TEST_CASE("peak amplitude of a one-soliton") {
  const cplx z1(0.3, 0.6), c1(1.0, 0.0);
  const RVec y = linspace(-10.0, 10.0, 20001);
  const SolitonField f = reconstruct_u(ensemble({{z1, c1}}), y, 0.0);
  double peak = 0.0, oracle_peak = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    peak = std::max(peak, std::abs(f.u_of_y[i]));
    oracle_peak = std::max(oracle_peak, std::abs(OnePole(z1, c1, y[i], 0.0).u_raw()));
  }
  CHECK(peak > 0.1);
  CHECK(std::abs(peak - oracle_peak) < 1e-8);
  CHECK(std::abs(std::abs(f.d_phase) - 1.0) < 1e-10);
}

TEST_CASE("sigma2 symmetry and unimodularity for two poles") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  const SolitonEnsemble e = ensemble({{cplx(0.5, 0.4), cplx(1.0, 0.5)}, {cplx(-0.8, 0.9), cplx(-0.3, 0.2)}});
  for (int trial = 0; trial < 10; ++trial) {
    const double y = 3.0 * uni(rng), t = 2.0 + 2.0 * uni(rng);
    const cplx z(2.0 * uni(rng), 2.0 * uni(rng));
    const RhpSolution s = solve_rhp(e, y, t);
    const Mat2 m = s(z), mc = s(std::conj(z));
    CHECK((sigma2_conj(mc) - m).max_abs() < 1e-10);
    CHECK(std::abs(m.det() - 1.0) < 1e-9);
  }
}

TEST_CASE("triangle split does not change the field") {
  const std::vector<PoleDatum> poles{{cplx(0.5, 0.4), cplx(1.0, 0.5)}, {cplx(-0.8, 0.9), cplx(-0.3, 0.2)}};
  const RVec y = linspace(-6.0, 6.0, 61);
  const SolitonField none = reconstruct_u(ensemble(poles, SplitMode::None), y, 1.0);
  const SolitonField all = reconstruct_u(ensemble(poles, SplitMode::All), y, 1.0);
  const SolitonField aut = reconstruct_u(ensemble(poles, SplitMode::Auto), y, 1.0);
  double d1 = 0.0, d2 = 0.0, dx = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    d1 = std::max(d1, std::abs(none.u_of_y[i] - all.u_of_y[i]));
    d2 = std::max(d2, std::abs(none.u_of_y[i] - aut.u_of_y[i]));
    dx = std::max(dx, std::abs(none.x_of_y[i] - all.x_of_y[i]));
  }
  CHECK(d1 < 1e-8);
  CHECK(d2 < 1e-8);
  CHECK(dx < 1e-8);
}

TEST_CASE("hodograph map of regular solitons") {
  // dy/dx = sqrt(m) >= 1, so x(y) rises with slope in (0, 1]
  const RVec y = linspace(-20.0, 20.0, 2001);
  const SolitonField f = reconstruct_u(ensemble({{cplx(0.5, 0.3), 1.0}, {cplx(-0.6, 0.2), cplx(0.0, 2.0)}}), y, 3.0);
  double lo = 1e9, hi = 0.0;
  for (std::size_t i = 1; i < y.size(); ++i) {
    const double s = (f.x_of_y[i] - f.x_of_y[i - 1]) / (y[i] - y[i - 1]);
    lo = std::min(lo, s);
    hi = std::max(hi, s);
  }
  CHECK(lo > 0.0);
  CHECK(hi <= 1.0 + 1e-9);
}

TEST_CASE("loop soliton folds the hodograph map") {
  // Im z > |Re z|: x(y) turns back and the profile is multivalued in x
  const RVec y = linspace(-20.0, 20.0, 2001);
  SolitonField f = reconstruct_u(ensemble({{cplx(0.3, 0.6), 1.0}}), y, 0.0);
  double lo = 1e9;
  for (std::size_t i = 1; i < y.size(); ++i) lo = std::min(lo, f.x_of_y[i] - f.x_of_y[i - 1]);
  CHECK(lo < 0.0);
  CHECK_THROWS_AS(invert_hodograph(f, linspace(-5.0, 5.0, 11)), NumericalError);
}

TEST_CASE("inverse of a synthetic hodograph map") {
  const RVec y = linspace(-10.0, 10.0, 20001);
  RVec x(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) x[i] = y[i] + std::tanh(y[i]);
  const RVec xq = linspace(-9.0, 9.0, 101);
  const RVec yq = inverse_map(y, x, xq);
  double err = 0.0;
  for (std::size_t i = 0; i < xq.size(); ++i) err = std::max(err, std::abs(yq[i] + std::tanh(yq[i]) - xq[i]));
  CHECK(err < 1e-9);

  RVec bad = x;
  bad[100] = bad[99];
  SolitonField f;
  f.y = y;
  f.x_of_y = bad;
  f.u_of_y = CVec(y.size(), 0.0);
  CHECK_THROWS_AS(invert_hodograph(f, xq), NumericalError);
}

TEST_CASE("change of variables in the L2 norm") {
  const SolitonEnsemble e = ensemble({{cplx(0.5, 0.3), 1.0}});
  const RVec y = linspace(-40.0, 40.0, 8001);
  SolitonField f = reconstruct_u(e, y, 0.0);
  const double h = y[1] - y[0];
  RVec xy(y.size());
  {
    CVec xc(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) xc[i] = f.x_of_y[i];
    const CVec d = derivative_fd4(xc, h);
    for (std::size_t i = 0; i < y.size(); ++i) xy[i] = d[i].real();
  }
  RVec in_y(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) in_y[i] = std::norm(f.u_of_y[i]) * xy[i];
  const double norm_y = trapezoid(std::span<const double>(in_y), h);

  const RVec xg = linspace(f.x_of_y.front() + 1.0, f.x_of_y.back() - 1.0, 8001);
  const HodographEvaluator ev = soliton_evaluator(e, 0.0);
  const CVec ux = invert_hodograph(f, xg, &ev);
  RVec in_x(xg.size());
  for (std::size_t i = 0; i < xg.size(); ++i) in_x[i] = std::norm(ux[i]);
  const double norm_x = trapezoid(std::span<const double>(in_x), xg[1] - xg[0]);
  CHECK(norm_y > 0.1);
  CHECK(std::abs(norm_x - norm_y) < 1e-7);
}

TEST_CASE("cone filter with every pole inside") {
  const ConeSpec cone{-1.0, 1.0, -2.0, -0.1};
  const std::vector<PoleDatum> poles{{cplx(0.5, 0.4), cplx(1.0, 0.5)}, {cplx(-0.8, 0.9), cplx(-0.3, 0.2)}};
  const ConeFilterResult r = cone_filter(poles, cone);
  REQUIRE(r.inside.size() == 2);
  for (std::size_t k = 0; k < 2; ++k) CHECK(r.inside.poles[k].c == poles[k].c);
  CHECK(std::isinf(r.mu));
  CHECK(r.faster.empty());
}

TEST_CASE("cone filter on a nine-pole configuration keeps four") {
  // |z| in (0.5, 1) is inside; the kept poles are numbers 1, 2, 5 and 7
  const ConeSpec cone{-2.0, 2.0, -1.0, -0.25};
  const std::vector<PoleDatum> poles{
      {cplx(0.6, 0.4), 1.0},  {cplx(-0.5, 0.5), 1.0}, {cplx(1.2, 0.5), 1.0},
      {cplx(-1.0, 0.9), 1.0}, {cplx(0.2, 0.8), 1.0},  {cplx(0.1, 0.3), 1.0},
      {cplx(-0.3, 0.6), 1.0}, {cplx(0.3, 0.2), 1.0},  {cplx(2.0, 0.4), 1.0}};
  const ConeFilterResult r = cone_filter(poles, cone);
  CHECK(r.inside.size() == 4);
  CHECK(r.inside_index == std::vector<std::size_t>{0, 1, 4, 6});
  CHECK(r.faster.size() == 2);  // |z| < 0.5
  CHECK(r.mu > 0.0);
  for (std::size_t j = 0; j < r.inside.size(); ++j) {
    const cplx zk = r.inside.poles[j].z;
    cplx expect = 1.0;
    for (std::size_t f : {5u, 7u}) {
      const cplx ratio = (zk - poles[f].z) / (zk - std::conj(poles[f].z));
      expect *= ratio * ratio;
    }
    CHECK(std::abs(r.inside.poles[j].c - expect) < 1e-14);
  }
  CHECK_THROWS_AS(cone_filter(poles, ConeSpec{0.0, 1.0, -0.5, -0.5}), std::invalid_argument);
}

TEST_CASE("excluded pole decays at the predicted rate") {
  // inside |z|^2 = 0.45, excluded |z|^2 = 1.48 (slower than the cone)
  const std::vector<PoleDatum> poles{{cplx(0.3, 0.6), 1.0}, {cplx(0.2, 1.2), cplx(0.5, 0.5)}};
  const ConeSpec cone{-1.0, 1.0, -1.0, -0.4};
  const ConeFilterResult r = cone_filter(poles, cone);
  REQUIRE(r.inside.size() == 1);
  REQUIRE(std::isfinite(r.mu));
  const SolitonEnsemble full = ensemble(poles);
  double fitted = 0.0;
  for (double t : {20.0, 30.0, 40.0}) {
    for (int j = 0; j <= 10; ++j) {
      const double lo = cone.y1 - cone.v2 * t, hi = cone.y2 - cone.v1 * t;
      const double y = lo + (hi - lo) * j / 10.0;
      if (!cone.contains(y, t)) continue;
      const double diff = std::abs(cone_field(r, y, t).u_raw - zero_limit(full, y, t).u_raw);
      fitted = std::max(fitted, diff * std::exp(2.0 * r.mu * t));
    }
  }
  CHECK(fitted < 10.0);
}
