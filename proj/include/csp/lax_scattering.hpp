#pragma once

// Direct scattering for the WKI-type Lax pair of the complex short pulse
// equation, in the normalisation that sends the eigenfunctions to the
// identity as z -> infinity.
//
// With w = u_x and m = 1 + |w|^2 the x-part psi_x = iz [[1, w], [w*, -1]] psi
// is diagonalised by the unitary G(x). Writing psi = G e^{D sigma3} mu e^{izp sigma3}
// with p_x = sqrt(m), D_x = (w* w_x - w w*_x) / (4 sqrt(m)(sqrt(m)+1)) gives
//
//   mu_x = iz sqrt(m) [sigma3, mu] + e^{-D sigma3} A_off e^{D sigma3} mu,
//
// A = -G^{-1} G_x. The integrator propagates mu_hat = e^{D sigma3} mu, whose
// generator is iz sqrt(m) sigma3 + A without any D dependence, using a
// sixth-order Magnus step (three Gauss nodes per cell) with exact 2x2
// exponentials. The step is exactly unimodular, and exactly unitary for real z.
//
// A potential can also be given parametrically as a curve (x(y), u(y)) in the
// arc-length variable y = x - c_plus(x). There x_y^2 + |u_y|^2 = 1, p = y, and
// the same equation stays regular when x(y) folds back (loop profiles).

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "csp/num_core.hpp"

namespace csp::scatter {

struct ComplexField1D {
  Grid1D grid;
  CVec values;
};

enum class DerivativeMethod { FiniteDifference4, Spectral };

struct PotentialOptions {
  DerivativeMethod derivative = DerivativeMethod::Spectral;
  double decay_threshold = 1e-8;  // |u| allowed at the grid ends
};

/// Coefficient data of the x-equation at one abscissa.
struct LaxNode {
  double sqrt_m = 1.0;
  cplx a11 = 0.0;  // D_x; A = [[a11, -conj(a21)], [a21, -a11]]
  cplx a21 = 0.0;
};

/// Immutable potential with every derived field the scattering code needs.
class Potential {
 public:
  static Potential build(const ComplexField1D& u0, const PotentialOptions& opts = {});
  /// Curve form: uniform y grid, x(y) and u(y) samples. Derivatives are spectral.
  static Potential build_parametric(const Grid1D& y_grid, const RVec& x_of_y, const CVec& u_of_y,
                                    double decay_threshold = 1e-8);

  bool parametric() const { return parametric_; }

  const Grid1D& grid() const { return grid_; }
  const CVec& u() const { return u_; }
  const CVec& ux() const { return ux_; }    // u_y in curve form
  const CVec& uxx() const { return uxx_; }  // u_yy in curve form
  const RVec& m() const { return m_; }
  const RVec& c_plus() const { return c_plus_; }   // int_x^inf (sqrt(m) - 1)
  const CVec& d_minus() const { return d_minus_; } // int_-inf^x D_x
  const CVec& d_plus() const { return d_plus_; }   // int_x^inf D_x
  cplx d() const { return d_; }
  double c() const { return c_total_; }            // int (sqrt(m) - 1)
  /// p(x, 0) = x - c_plus(x) on the grid, consistent with the Magnus steps.
  const RVec& p() const { return p_; }
  /// Per-cell increments of p, Simpson rule on the half grid (size n-1).
  const RVec& dp() const { return dp_; }

  // Three Gauss nodes per cell: cell i owns indices 3i, 3i+1, 3i+2.
  const std::vector<LaxNode>& nodes() const { return nodes_; }
  std::size_t size() const { return grid_.size(); }

 private:
  Grid1D grid_;
  CVec u_, ux_, uxx_;
  RVec m_, c_plus_, p_, dp_;
  CVec d_minus_, d_plus_;
  cplx d_ = 0.0;
  double c_total_ = 0.0;
  std::vector<LaxNode> nodes_;
  bool parametric_ = false;
};

/// Evaluate the coefficient data from w = u_x and w_x = u_xx.
LaxNode lax_node(cplx w, cplx wx);
/// Same data from a unit tangent (a, omega) = (x_s, u_s) / speed and its
/// derivative in s; `speed` is dp/ds.
LaxNode lax_node_tangent(double a, cplx omega, double a_s, cplx omega_s, double speed);

/// Gauss-Legendre abscissae on [0, 1] used by the Magnus step.
inline constexpr std::array<double, 3> kGaussNodes{0.5 - 0.38729833462074168852, 0.5,
                                                   0.5 + 0.38729833462074168852};

/// Matrix A(x) = -G^{-1} G_x and G(x) itself, exposed for tests.
Mat2 lax_generator(const LaxNode& node, cplx z);
Mat2 gauge_matrix(cplx w);

struct EigenPair {
  cplx z;
  std::vector<Mat2> mu_minus;  // normalised to I at x_min
  std::vector<Mat2> mu_plus;   // normalised to I at x_max
};

struct IntegrationOptions {
  double exponent_cap = 300.0;  // max |Im z| * (total p variation)
};

/// Both Jost matrices on the whole grid for one spectral parameter.
EigenPair integrate_eigenfunctions(const Potential& p, cplx z, const IntegrationOptions& opts = {});

/// Column 2 of mu_minus (analytic in C+) integrated forward; entries per grid point.
std::vector<std::array<cplx, 2>> mu_minus_column2(const Potential& p, cplx z);
/// Column 1 of mu_plus (analytic in C+) integrated backward.
std::vector<std::array<cplx, 2>> mu_plus_column1(const Potential& p, cplx z);

/// s22(z) for Im z >= 0, from column 2 of mu_minus.
cplx s22(const Potential& p, cplx z);

struct ScatteringSamples {
  RVec z_grid;
  CVec s11, s12, s21, s22, r;
  std::vector<std::string> errors;  // empty string when the sample is good
};

struct ScatteringOptions {
  double zero_window = 1e-3;  // samples with |z| < zero_window/2 are interpolated
};

/// S(z) on a real grid, OpenMP-parallel over the samples.
ScatteringSamples scattering_matrix(const Potential& p, const RVec& z_grid, const ScatteringOptions& opts = {});
/// Serial reference for the same sweep.
ScatteringSamples scattering_matrix_serial(const Potential& p, const RVec& z_grid,
                                           const ScatteringOptions& opts = {});

/// Full scattering matrix at one real z.
Mat2 scattering_matrix_at(const Potential& p, double z);

// ---------------------------------------------------------------------------
// Discrete spectrum

struct SearchBox {
  double re_min = -2.0, re_max = 2.0;
  double im_min = 0.05, im_max = 2.0;
};

struct ZeroSearchOptions {
  std::size_t edge_samples = 48;
  int max_depth = 8;
  double newton_tol = 1e-13;
  int newton_max_iter = 50;
};

struct ZeroSearchResult {
  std::vector<RootResult> zeros;
  int winding_count = 0;
  std::vector<std::string> warnings;
};

/// Winding number of f around the box boundary (argument principle).
int winding_number(const AnalyticFn& f, const SearchBox& box, std::size_t edge_samples = 48);

/// All zeros of an analytic function inside a rectangle: winding counts on
/// sub-rectangles followed by Newton refinement.
ZeroSearchResult find_zeros(const AnalyticFn& f, const SearchBox& box, const ZeroSearchOptions& opts = {});

struct DiscretePole {
  cplx z;
  cplx c;           // norming constant b / s22'(z)
  cplx b;           // connection constant
  cplx s22_prime;
  double residual = 0.0;
  bool converged = true;
};

struct DiscreteSpectrum {
  std::vector<DiscretePole> poles;
  int winding_count = 0;
  std::vector<std::string> warnings;
};

struct SpectrumOptions {
  double rho_min = 0.05;
  double central_window = 0.30;  // fraction of the grid used to average b
  ZeroSearchOptions search;
};

/// Connection constant b at a zero z_k: mu_minus,2 = b e^{2 i z_k p} mu_plus,1,
/// averaged over the central grid window.
cplx connection_constant(const Potential& p, cplx zk, double central_window = 0.30);

DiscreteSpectrum find_discrete_spectrum(const Potential& p, const SearchBox& box,
                                        const SpectrumOptions& opts = {});

// ---------------------------------------------------------------------------

struct ConservedQuantities {
  double I0 = 0.0;
  cplx I1 = 0.0;  // literal density, see README
  cplx I2 = 0.0;  // literal density
  bool literal_formula = true;
  std::size_t skipped_points = 0;
  std::vector<std::string> warnings;
};

ConservedQuantities conserved_quantities(const Potential& p);

}  // namespace csp::scatter
