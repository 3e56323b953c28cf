#include <doctest.h>

#include <random>

#include "csp/asymptotics.hpp"

using namespace csp;
using namespace csp::asym;

namespace {

constexpr double kNuUnit = -0.110317800076325796698;  // -log 2 / (2 pi)

RVec z_axis(double a, double b, std::size_t n) {
  RVec z(n);
  for (std::size_t k = 0; k < n; ++k) z[k] = a + (b - a) * static_cast<double>(k) / static_cast<double>(n - 1);
  return z;
}

ScatteringData zero_data(std::vector<PoleDatum> poles = {}) {
  ScatteringData d;
  d.poles = std::move(poles);
  d.z_grid = z_axis(-4.0, 4.0, 801);
  d.r = CVec(d.z_grid.size(), 0.0);
  return d;
}

// smooth reflection supported on z > 0; vanishes like z^3 at the origin
cplx one_sided_r(double z) {
  if (z <= 0.0) return 0.0;
  return 0.6 * z * z * z * std::exp(-(z - 1.5) * (z - 1.5)) * std::exp(kI * 0.7 * z);
}

// reflection on both sides, vanishing like z^2 at the origin
cplx two_sided_r(double z) {
  return 0.8 * z * z * std::exp(-0.5 * z * z) * std::exp(kI * (0.3 + z));
}

ScatteringData sampled(cplx (*r)(double), std::vector<PoleDatum> poles = {}) {
  ScatteringData d;
  d.poles = std::move(poles);
  d.z_grid = z_axis(-5.0, 5.0, 4001);
  d.r.resize(d.z_grid.size());
  for (std::size_t k = 0; k < d.z_grid.size(); ++k) d.r[k] = r(d.z_grid[k]);
  return d;
}

}  // namespace

TEST_CASE("phase geometry") {
  const PhaseContext c = phase_context(25.0, 100.0);
  CHECK(c.z0 == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(std::abs(c.theta(1.0) - 0.5) < 1e-15);
  CHECK(std::abs(c.theta(-1.0) + 0.5) < 1e-15);

  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> uni(-2.0, 2.0);
  const PhaseContext d = phase_context(3.0, 7.0);
  for (int k = 0; k < 20; ++k) {
    const cplx z(uni(rng), uni(rng));
    CHECK(std::abs(d.theta(-z) + d.theta(z)) < 1e-14 * (1.0 + std::abs(d.theta(z))));
    const cplx on_circle = std::polar(d.z0, uni(rng) * kPi);
    CHECK(std::abs((2.0 * kI * d.t * d.theta(on_circle)).real()) < 1e-12);
  }
  // 2 i t theta(z) = 2 i (z y + t/(4z))
  const cplx z(0.4, 0.3);
  CHECK(std::abs(2.0 * kI * d.t * d.theta(z) - 2.0 * kI * (z * d.y + d.t / (4.0 * z))) < 1e-13);

  CHECK_THROWS_AS(phase_context(-3.0, 7.0), FastDecayRegion);
  CHECK_THROWS_AS(phase_context(3.0, 0.0), std::invalid_argument);
}

TEST_CASE("zero reflection gives the trivial conjugation") {
  const ScatteringData d = zero_data();
  const ConjugationData cj(d, 1.2);
  CHECK(cj.nu(0.3) == 0.0);
  CHECK(cj.nu_plus() == 0.0);
  CHECK(cj.nu_minus() == 0.0);
  for (cplx z : {cplx(0.3, 0.5), cplx(-2.0, -0.1), cplx(5.0, 0.0)}) {
    CHECK(std::abs(cj.delta(z) - 1.0) < 1e-15);
    CHECK(std::abs(cj.T(z) - 1.0) < 1e-15);
  }
  CHECK(std::abs(cj.T1()) < 1e-15);
  CHECK(std::abs(cj.T0() - 1.0) < 1e-15);
}

TEST_CASE("resolution guards") {
  const ScatteringData d = sampled(two_sided_r);
  CHECK_THROWS_AS(ConjugationData(d, 0.005), InsufficientResolution);  // below 3 grid spacings
  CHECK_THROWS_AS(ConjugationData(d, 0.05), InsufficientResolution);   // fewer than 200 samples inside
  CHECK_THROWS_AS(ConjugationData(d, 6.0), InsufficientResolution);    // outside the r grid
  CHECK_NOTHROW(ConjugationData(zero_data(), 6.0));                    // nothing to resolve
}

TEST_CASE("conjugation identities with radiation and an inner pole") {
  const ScatteringData d = sampled(two_sided_r, {{cplx(0.3, 0.4), 1.0}, {cplx(1.5, 1.0), 1.0}});
  const ConjugationData cj(d, 1.5);
  REQUIRE(cj.delta_plus().size() == 1);  // only |z| < z0

  for (double s : z_axis(-1.4, 1.4, 20)) {
    CHECK(cj.nu(s) <= 0.0);
    const cplx jump = cj.delta_boundary(s, +1) / cj.delta_boundary(s, -1);
    CHECK(std::abs(jump - (1.0 + std::norm(two_sided_r(s)))) < 1e-6);
    const cplx tjump = cj.T_boundary(s, +1) / cj.T_boundary(s, -1);
    CHECK(std::abs(tjump - (1.0 + std::norm(two_sided_r(s)))) < 1e-6);
  }

  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> re(-3.0, 3.0), im(-2.0, 2.0);
  int used = 0;
  while (used < 100) {
    const cplx z(re(rng), im(rng));
    if (std::abs(z.imag()) < 0.05 || std::abs(z - cplx(0.3, 0.4)) < 0.05 || std::abs(z - cplx(0.3, -0.4)) < 0.05)
      continue;
    ++used;
    CHECK(std::abs(cj.T(z) * std::conj(cj.T(std::conj(z))) - 1.0) < 1e-9);
  }

  // T'(0)/T(0) against a one-sided difference along the imaginary axis
  const double h = 1e-4;
  const cplx t0 = cj.T0(), t1 = cj.T(kI * h), t2 = cj.T(2.0 * kI * h);
  const cplx fd = (-3.0 * t0 + 4.0 * t1 - t2) / (2.0 * kI * h) / t0;
  CHECK(std::abs(fd - cj.T1()) < 1e-6);
  CHECK(std::abs(cj.T1() - (-2.0 * kI * 0.4 / 0.25 + kI * cj.int_nu_over_s2())) < 1e-14);

  // z (T(z) - 1) -> i (2 sum Im z_k - int nu) along the imaginary axis
  double int_nu = 0.0;
  {
    const RVec s = z_axis(-1.5, 1.5, 30001);
    RVec v(s.size());
    for (std::size_t k = 0; k < s.size(); ++k) v[k] = cj.nu(s[k]);
    int_nu = trapezoid(std::span<const double>(v), s[1] - s[0]);
  }
  auto scaled = [&](double r) { return kI * r * (cj.T(kI * r) - 1.0); };
  const cplx limit = 2.0 * scaled(2e3) - scaled(1e3);  // removes the 1/R term
  CHECK(std::abs(limit - kI * (2.0 * 0.4 - int_nu)) < 1e-4);
}

TEST_CASE("printed T1 differs from the derivative of T") {
  const ScatteringData d = sampled(two_sided_r);
  const ConjugationData cj(d, 1.5);
  // no poles: the derivative is +i int nu/s^2, the printed form -int nu/s^2
  CHECK(std::abs(cj.T1() - kI * cj.int_nu_over_s2()) < 1e-15);
  CHECK(std::abs(cj.T1_literal() + cj.int_nu_over_s2()) < 1e-15);
  CHECK(cj.int_nu_over_s2() < 0.0);
}

TEST_CASE("stationary-point asymptotics of T") {
  const ScatteringData d = sampled(two_sided_r);
  const ConjugationData cj(d, 1.5);
  CHECK(std::abs(std::abs(cj.T0_plus()) - 1.0) < 1e-12);
  CHECK(std::abs(std::abs(cj.T0_minus()) - std::exp(-kPi * cj.nu_minus())) < 1e-10);
  // T(z) (z - z0)^{-i nu(z0)} -> T0(+z0)
  const double eps = 1e-6;
  const cplx z = 1.5 + cplx(eps, eps);
  const cplx approx = cj.T(z) * std::pow(z - 1.5, -kI * cj.nu_plus());
  CHECK(std::abs(approx - cj.T0_plus()) < 1e-4);
}

TEST_CASE("parabolic cylinder coefficients") {
  SUBCASE("unit reflection") {
    CHECK(std::abs(pc_nu(1.0) - kNuUnit) < 1e-15);
    const auto [b12, b21] = pc_betas(1.0);
    CHECK(std::abs(b12 * b21 - kNuUnit) < 1e-12);
  }
  SUBCASE("random points on the unit circle and off it") {
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> ang(-kPi, kPi), rad(0.05, 3.0);
    for (int k = 0; k < 50; ++k) {
      for (const cplx r0 : {std::polar(1.0, ang(rng)), std::polar(rad(rng), ang(rng))}) {
        const double nu = pc_nu(r0);
        const auto [b12, b21] = pc_betas(r0);
        CHECK(std::abs(b12 * b21 - nu) < 1e-12);
        CHECK(std::abs(std::norm(b12) - std::abs(nu)) < 1e-10);
      }
    }
  }
  SUBCASE("zero reflection") {
    const auto [b12, b21] = pc_betas(0.0);
    CHECK(b12 == cplx(0.0));
    CHECK(b21 == cplx(0.0));
    const ScatteringData d = zero_data();
    const PhaseContext ctx = phase_context(25.0, 100.0);
    const ConjugationData cj(d, ctx.z0);
    for (auto v : {FormulaVariant::Derived, FormulaVariant::Literal}) {
      const PCCoefficients pc = pc_coefficients(ctx, cj, d, v);
      CHECK(pc.M1_plus.max_abs() == 0.0);
      CHECK(pc.M1_minus.max_abs() == 0.0);
      const EExpansion e = e_expansion([](cplx) { return Mat2::identity(); }, pc, ctx);
      CHECK((e.E0 - Mat2::identity()).max_abs() == 0.0);
      CHECK(e.E1.max_abs() == 0.0);
    }
  }
}

TEST_CASE("coefficients at both stationary points") {
  const ScatteringData d = sampled(two_sided_r);
  const PhaseContext ctx = phase_context(100.0 / (4.0 * 1.2 * 1.2), 100.0);
  const ConjugationData cj(d, ctx.z0);
  for (auto v : {FormulaVariant::Derived, FormulaVariant::Literal}) {
    const PCCoefficients pc = pc_coefficients(ctx, cj, d, v);
    CHECK(std::abs(pc.beta12_plus * pc.beta21_plus - pc.nu_plus) < 1e-12);
    CHECK(std::abs(pc.beta12_minus * pc.beta21_minus - pc.nu_minus) < 1e-12);
    CHECK(std::abs(std::norm(pc.beta12_plus) - std::abs(pc.nu_plus)) < 1e-10);
    CHECK(std::abs(std::norm(pc.beta12_minus) - std::abs(pc.nu_minus)) < 1e-10);
    // strictly off-diagonal
    CHECK(pc.M1_plus(0, 0) == cplx(0.0));
    CHECK(pc.M1_plus(1, 1) == cplx(0.0));
    CHECK(pc.M1_minus(0, 0) == cplx(0.0));
    CHECK(pc.M1_minus(1, 1) == cplx(0.0));
    CHECK(std::abs(pc.M1_plus(0, 1)) > 0.0);
    CHECK(std::abs(pc.M1_minus(0, 1)) > 0.0);
  }
  // the derived reduced reflection keeps |r| at +z0
  const PCCoefficients pc = pc_coefficients(ctx, cj, d, FormulaVariant::Derived);
  CHECK(std::abs(std::abs(pc.r0_plus) - std::abs(two_sided_r(ctx.z0))) < 1e-10);
  CHECK(std::abs(pc.nu_plus - cj.nu_plus()) < 1e-12);
}

TEST_CASE("E expansion with the identity outer model") {
  const ScatteringData d = sampled(two_sided_r);
  const PhaseContext ctx = phase_context(100.0 / (4.0 * 1.2 * 1.2), 100.0);
  const ConjugationData cj(d, ctx.z0);
  const MatrixFn identity = [](cplx) { return Mat2::identity(); };
  const cplx s0 = std::sqrt(ctx.z0 / ctx.t) / kI;
  const cplx s1 = 1.0 / (kI * std::sqrt(ctx.z0 * ctx.t));

  const PCCoefficients lit = pc_coefficients(ctx, cj, d, FormulaVariant::Literal);
  const EExpansion el = e_expansion(identity, lit, ctx);
  CHECK((el.E0 - (Mat2::identity() + s0 * (lit.M1_plus - lit.M1_minus))).max_abs() < 1e-15);
  CHECK((el.E1 - s1 * (lit.M1_plus + lit.M1_minus)).max_abs() < 1e-15);

  const PCCoefficients der = pc_coefficients(ctx, cj, d, FormulaVariant::Derived);
  const EExpansion ed = e_expansion(identity, der, ctx);
  CHECK((ed.E0 - (Mat2::identity() + s0 * (der.M1_minus - der.M1_plus))).max_abs() < 1e-15);
  CHECK((ed.E1 + s1 * (der.M1_plus + der.M1_minus)).max_abs() < 1e-15);

  const MatrixFn singular = [](cplx) { return Mat2::zero(); };
  CHECK_THROWS_AS(e_expansion(singular, der, ctx), OuterModelSingular);
}

TEST_CASE("E0 - I decays like t^{-1/2} along a ray") {
  const ScatteringData d = sampled(one_sided_r);
  const MatrixFn identity = [](cplx) { return Mat2::identity(); };
  const double z0 = 1.3;
  auto size_at = [&](double t) {
    const PhaseContext ctx = phase_context(t / (4.0 * z0 * z0), t);
    const ConjugationData cj(d, ctx.z0);
    const PCCoefficients pc = pc_coefficients(ctx, cj, d);
    return (e_expansion(identity, pc, ctx).E0 - Mat2::identity()).max_abs();
  };
  const double a = size_at(100.0), b = size_at(400.0);
  CHECK(a > 0.0);
  CHECK(std::abs(a / b - 2.0) < 0.1);
}

TEST_CASE("radiation-only field against a hand-assembled product") {
  const ScatteringData d = sampled(two_sided_r);
  const soliton::ConeSpec cone{-5.0, 5.0, -0.3, -0.1};
  const double t = 100.0;
  const TheoremEvaluator ev(cone, d, t);
  const double y = 16.0;  // z0 = 1.25 sits on the cache lattice
  const AsymptoticSample s = ev.at_y(y);

  const PhaseContext ctx = phase_context(y, t);
  const ConjugationData cj(d, ctx.z0);
  const PCCoefficients pc = pc_coefficients(ctx, cj, d);
  // E1 = -(M1+ + M1-)/(i sqrt(z0 t)); (M1+)_12 = -beta21+, (M1-)_12 = -beta12-
  const cplx e1_12 = (pc.beta21_plus + pc.beta12_minus) / (kI * std::sqrt(ctx.z0 * t));
  const cplx e2d = exp_d(d) * exp_d(d);
  const cplx delta0 = cj.delta0();
  const cplx expect = e2d * delta0 * delta0 * e1_12 / kI;
  CHECK(s.u_leading == cplx(0.0));
  CHECK(std::abs(s.u - expect) < 1e-10 * std::abs(expect));
  CHECK(std::abs(s.correction) > 1e-4);
  CHECK(std::abs(std::abs(e2d) - 1.0) < 1e-12);

  // repeated evaluation reuses the cached conjugation data
  const std::size_t n = ev.cache_size();
  ev.at_y(y);
  CHECK(ev.cache_size() == n);
}

TEST_CASE("reflectionless data inside the cone reproduces the solitons") {
  const std::vector<PoleDatum> poles{{cplx(0.5, 0.3), 1.0}, {cplx(-0.6, 0.2), cplx(0.3, 0.4)}};
  const ScatteringData d = zero_data(poles);
  const soliton::ConeSpec cone{-1.0, 1.0, -1.0, -0.5};
  const double t = 20.0;
  const TheoremEvaluator ev(cone, d, t);
  soliton::SolitonEnsemble e;
  e.poles = poles;
  const RVec y = z_axis(10.0, 20.0, 11);
  const soliton::SolitonField f = soliton::reconstruct_u(e, y, t);
  for (std::size_t i = 0; i < y.size(); ++i) {
    const AsymptoticSample s = ev.at_y(y[i]);
    CHECK(s.correction == cplx(0.0));
    CHECK(std::abs(s.u - f.u_of_y[i]) < 1e-8);
    CHECK(std::abs(s.x - f.x_of_y[i]) < 1e-8);
  }
}

TEST_CASE("zero data gives the zero field on x = y") {
  const ScatteringData d = zero_data();
  const soliton::ConeSpec cone{-2.0, 2.0, -0.5, -0.2};
  const RVec x = z_axis(0.0, 40.0, 81);
  std::vector<std::string> warnings;
  const auto out = theorem_formula(cone, d, x, 50.0, {}, &warnings);
  REQUIRE(!out.empty());
  for (const auto& s : out) {
    CHECK(s.u == cplx(0.0));
    CHECK(std::abs(s.x - s.y) < 1e-12);
    CHECK(cone.contains(s.y, 50.0));
  }
  TheoremOptions lit;
  lit.variant = FormulaVariant::Literal;
  std::vector<std::string> lw;
  theorem_formula(cone, d, x, 50.0, lit, &lw);
  CHECK_FALSE(lw.empty());  // the -i/T1 term is dropped with a warning
}
