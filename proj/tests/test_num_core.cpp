#include <doctest.h>

#include <random>

#include "csp/num_core.hpp"

using namespace csp;

namespace {

RVec linspace(double a, double b, std::size_t n) {
  RVec x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
  return x;
}

}  // namespace

TEST_CASE("gamma at classical points") {
  CHECK(std::abs(complex_gamma(1.0) - 1.0) < 1e-14);
  CHECK(std::abs(complex_gamma(0.5) - std::sqrt(kPi)) < 1e-14);
  CHECK(std::abs(complex_gamma(5.0) - 24.0) < 1e-12);
}

TEST_CASE("gamma modulus on the imaginary axis") {
  const double nu = 0.25;
  const double expect = kPi / (nu * std::sinh(kPi * nu));  // 14.466203167263996...
  CHECK(std::abs(std::norm(complex_gamma(cplx(0.0, nu))) - expect) < 1e-12 * expect);
  CHECK(std::abs(expect - 14.466203167263996) < 1e-12);
}

TEST_CASE("gamma against high-precision values") {
  // reference values from 30-digit evaluation
  struct Case {
    cplx z, g;
  };
  const Case cases[] = {
      {{0.3, 0.7}, {0.30968625674374915557, -0.85678775293927057254}},
      {{-2.5, 1.0}, {-0.041736625807893613745, -0.086369107369763484694}},
      {{5.5, -0.2}, {49.450597251058943496, -16.512156234674315226}},
      {{0.0, -0.11031780007632579670}, {-0.56631529808740876656, 8.9569118092121717005}},
  };
  for (const auto& c : cases) {
    const cplx g = complex_gamma(c.z);
    CHECK(std::abs(g - c.g) < 1e-12 * std::abs(c.g));
  }
}

TEST_CASE("gamma recurrence on random points") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> rad(0.1, 10.0), ang(-kPi, kPi);
  for (int k = 0; k < 100; ++k) {
    const cplx z = std::polar(rad(rng), ang(rng));
    const cplx lhs = complex_gamma(z + 1.0), rhs = z * complex_gamma(z);
    CHECK(std::abs(lhs - rhs) <= 1e-11 * std::abs(lhs));
  }
}

TEST_CASE("reciprocal gamma vanishes at the poles") {
  for (int k = 0; k <= 5; ++k) CHECK(reciprocal_gamma(cplx(-k, 0.0)) == cplx(0.0));
  CHECK_THROWS_AS(complex_gamma(cplx(-3.0, 0.0)), std::domain_error);
  const cplx z(0.4, -1.3);
  CHECK(std::abs(reciprocal_gamma(z) * complex_gamma(z) - 1.0) < 1e-14);
}

TEST_CASE("cauchy integral: zero integrand") {
  Grid1D g(-1.0, 1.0, 101);
  CVec f(101, 0.0);
  CHECK(pv_cauchy_integral(f, g, cplx(0.0, 2.0)) == cplx(0.0));
}

TEST_CASE("cauchy integral: constant and linear densities") {
  Grid1D g(-1.0, 1.0, 201);
  CVec one(201, 1.0);
  const cplx z(0.0, 2.0);
  const cplx expect = std::log((z - 1.0) / (z + 1.0));
  CHECK(std::abs(pv_cauchy_integral(one, g, z) - expect) < 1e-10);
  CHECK(std::abs(expect - cplx(0.0, 0.92729521800161223243)) < 1e-14);

  CVec lin(201);
  const RVec s = g.points();
  for (std::size_t i = 0; i < s.size(); ++i) lin[i] = s[i];
  // 2 + 3 log(2/4)
  CHECK(std::abs(pv_cauchy_integral(lin, g, 3.0) - cplx(-0.079441541679835928252)) < 1e-10);
}

TEST_CASE("cauchy integral close to the segment") {
  Grid1D g(-1.0, 1.0, 401);
  const RVec s = g.points();
  CVec f(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) f[i] = std::exp(s[i]);
  const cplx z(0.2, 0.05);
  const cplx expect(1.6547236692360597287, 3.7394447238135485740);
  CHECK(std::abs(pv_cauchy_integral(f, g, z) - expect) < 1e-8);
  CHECK_THROWS_AS(pv_cauchy_integral(f, g, cplx(0.3, 0.0)), std::domain_error);
}

TEST_CASE("cauchy integral is linear in the density") {
  Grid1D g(-1.0, 1.0, 301);
  const RVec s = g.points();
  CVec f(s.size()), h(s.size()), mix(s.size());
  const cplx alpha(0.7, -1.2), beta(-2.0, 0.3);
  for (std::size_t i = 0; i < s.size(); ++i) {
    f[i] = std::cos(3.0 * s[i]);
    h[i] = cplx(s[i] * s[i], std::sin(s[i]));
    mix[i] = alpha * f[i] + beta * h[i];
  }
  for (const cplx z : {cplx(0.1, 0.002), cplx(-0.99, -0.05), cplx(2.0, 1.0)}) {
    const cplx lhs = pv_cauchy_integral(mix, g, z);
    const cplx rhs = alpha * pv_cauchy_integral(f, g, z) + beta * pv_cauchy_integral(h, g, z);
    CHECK(std::abs(lhs - rhs) < 1e-10 * (1.0 + std::abs(lhs)));
  }
}

TEST_CASE("trapezoid and cumulative integral") {
  const RVec x = linspace(0.0, kPi, 401);
  RVec f(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) f[i] = std::sin(x[i]);
  const double h = x[1] - x[0];
  CHECK(std::abs(trapezoid(std::span<const double>(f), h) - 2.0) < 1e-4);
  const RVec F = cumulative_integral(std::span<const double>(f), h);
  double err = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) err = std::max(err, std::abs(F[i] - (1.0 - std::cos(x[i]))));
  CHECK(err < 1e-9);
}

TEST_CASE("fourth-order derivative converges") {
  auto err_at = [](std::size_t n) {
    const RVec x = linspace(-2.0, 2.0, n);
    CVec f(n);
    for (std::size_t i = 0; i < n; ++i) f[i] = std::exp(kI * x[i]) * std::exp(-x[i] * x[i]);
    const CVec d = derivative_fd4(f, x[1] - x[0]);
    double e = 0.0;
    for (std::size_t i = 0; i < n; ++i) e = std::max(e, std::abs(d[i] - (kI - 2.0 * x[i]) * f[i]));
    return e;
  };
  const double e1 = err_at(201), e2 = err_at(401);
  CHECK(e1 / e2 > 12.0);
}

TEST_CASE("dense solve") {
  SUBCASE("identity") {
    ComplexMatrix a = ComplexMatrix::identity(3);
    const CVec b{cplx(1, 2), cplx(-3, 0.5), cplx(0, 7)};
    const CVec x = solve_dense(a, b);
    for (int i = 0; i < 3; ++i) CHECK(std::abs(x[i] - b[i]) < 1e-15);
  }
  SUBCASE("diagonal") {
    ComplexMatrix a(2, 2);
    a(0, 0) = 2.0;
    a(1, 1) = kI;
    const CVec x = solve_dense(a, CVec{2.0, kI});
    CHECK(std::abs(x[0] - 1.0) < 1e-15);
    CHECK(std::abs(x[1] - 1.0) < 1e-15);
  }
  SUBCASE("random well-conditioned 8x8") {
    std::mt19937_64 rng(7);
    std::normal_distribution<double> n(0.0, 1.0);
    ComplexMatrix a(8, 8);
    CVec b(8);
    for (std::size_t i = 0; i < 8; ++i) {
      for (std::size_t j = 0; j < 8; ++j) a(i, j) = cplx(n(rng), n(rng));
      a(i, i) += 8.0;
      b[i] = cplx(n(rng), n(rng));
    }
    const CVec x = solve_dense(a, b);
    const CVec ax = a * x;
    double r = 0.0, nb = 0.0;
    for (std::size_t i = 0; i < 8; ++i) {
      r += std::norm(ax[i] - b[i]);
      nb += std::norm(b[i]);
    }
    CHECK(std::sqrt(r / nb) <= 1e-10);
  }
  SUBCASE("singular matrix is reported") {
    ComplexMatrix a(2, 2);
    a(0, 0) = 1.0;
    a(0, 1) = 2.0;
    a(1, 0) = 2.0;
    a(1, 1) = 4.0;
    CHECK_THROWS_AS(solve_dense(a, CVec{1.0, 1.0}), SingularMatrixError);
  }
}

TEST_CASE("2x2 helpers") {
  const Mat2 k{cplx(0.3, 0.1), cplx(1.0, -0.5), cplx(-0.2, 0.4), cplx(-0.3, -0.1)};
  const Mat2 e = expm_traceless(k);
  CHECK(std::abs(e.det() - 1.0) < 1e-14);
  // compare with a Taylor series
  Mat2 term = Mat2::identity(), sum = Mat2::identity();
  for (int j = 1; j < 30; ++j) {
    term = (1.0 / static_cast<double>(j)) * (term * k);
    sum = sum + term;
  }
  CHECK((e - sum).max_abs() < 1e-14);
  CHECK((k * k.inverse() - Mat2::identity()).max_abs() < 1e-14);
}

TEST_CASE("newton refinement and analytic derivative") {
  const AnalyticFn f = [](cplx z) { return (z - kI) / (z + kI); };
  const RootResult r = newton_refine(f, cplx(0.2, 0.8));
  CHECK(r.converged);
  CHECK(std::abs(r.z - kI) < 1e-12);
  CHECK(std::abs(analytic_derivative(f, kI) - 1.0 / (2.0 * kI)) < 1e-10);
}
