#pragma once

// Reflectionless Riemann-Hilbert problem: partial-fraction solve, N-soliton
// reconstruction in the hodograph variable y, inversion back to x, and the
// space-time cone filter.

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "csp/num_core.hpp"
#include "csp/scattering_io.hpp"

namespace csp::soliton {

enum class SplitMode {
  None,      // every pole keeps the upper-triangular residue
  All,       // every pole swapped
  Auto,      // swap exactly the poles whose exponential grows at (y, t)
  Explicit,  // use SolitonEnsemble::split
};

struct SolitonEnsemble {
  std::vector<PoleDatum> poles;
  SplitMode mode = SplitMode::Auto;
  std::vector<bool> split;  // membership in the swapped set, Explicit mode only

  std::size_t size() const { return poles.size(); }
  /// Throws std::invalid_argument on coincident poles or poles off the upper half plane.
  void validate() const;
};

/// Exponent 2i(z y + t/(4z)).
cplx phase_exponent(cplx z, double y, double t);

/// Swapped set actually used at (y, t).
std::vector<bool> resolve_split(const SolitonEnsemble& e, double y, double t);

/// s22 restricted to the poles flagged in `split`, and its derivative.
cplx partial_s22(const std::vector<PoleDatum>& poles, const std::vector<bool>& split, cplx z);
cplx partial_s22_derivative(const std::vector<PoleDatum>& poles, const std::vector<bool>& split, cplx z);

struct RenormalizedConstants {
  std::vector<cplx> gamma;
  std::vector<bool> split;
  bool clamped = false;  // an exponent was capped at 700
};

RenormalizedConstants renormalized_constants(const SolitonEnsemble& e, double y, double t);

/// Solved partial-fraction representation of M at one (y, t).
class RhpSolution {
 public:
  Mat2 operator()(cplx z) const;
  /// dM/dz at z, exact from the partial fractions.
  Mat2 derivative(cplx z) const;
  /// M(z) of the original problem: the swapped factors divided back out.
  Mat2 unrenormalized(cplx z) const;

  const std::vector<bool>& split() const { return split_; }
  bool clamped() const { return clamped_; }

 private:
  friend RhpSolution solve_rhp(const SolitonEnsemble&, double, double);
  std::vector<cplx> poles_;  // z_k
  std::vector<bool> split_;
  // residue vectors per pole: P at z_k, Q at conj(z_k)
  std::vector<std::array<cplx, 2>> p_, q_;
  bool clamped_ = false;
};

/// Builds and solves the 2N x 2N system at (y, t).
RhpSolution solve_rhp(const SolitonEnsemble& e, double y, double t);

/// Convenience wrapper: M at every z in z_eval.
std::vector<Mat2> solve_reflectionless_rhp(const SolitonEnsemble& e, double y, double t,
                                           const std::vector<cplx>& z_eval);

struct ZeroLimit {
  cplx u_raw = 0.0;   // e^{-2d} u, referred back to the unrenormalised problem
  double c_plus = 0.0;
  double epsilon_used = 0.0;
  bool converged = true;
};

struct LimitOptions {
  double epsilon = 1e-4;
  double agreement = 1e-6;
  int max_halvings = 3;
};

/// z -> 0 limits of (M(0)^{-1} M(z))_{12} / (iz) and the 11 analogue, by
/// Richardson extrapolation along the imaginary axis.
ZeroLimit zero_limit(const SolitonEnsemble& e, double y, double t, const LimitOptions& opts = {});
/// Same limits from the exact derivative of the partial fractions.
ZeroLimit zero_limit_exact(const SolitonEnsemble& e, double y, double t);

/// e^{d} = prod z_k / conj(z_k) for reflectionless data.
cplx exp_d(const std::vector<PoleDatum>& poles);

struct SolitonField {
  double t = 0.0;
  RVec y;
  CVec u_of_y;
  RVec x_of_y;
  cplx d_phase = 1.0;  // e^{-2d}
  CVec u_of_x;
  RVec x_grid;
  std::vector<std::string> warnings;
};

/// u(y, t) and x(y, t) on y_grid, OpenMP-parallel over y.
SolitonField reconstruct_u(const SolitonEnsemble& e, const RVec& y_grid, double t, const LimitOptions& opts = {});
SolitonField reconstruct_u_serial(const SolitonEnsemble& e, const RVec& y_grid, double t,
                                  const LimitOptions& opts = {});

/// Exact point evaluator used to polish the hodograph inversion.
struct HodographSample {
  double x;
  cplx u;
};
using HodographEvaluator = std::function<HodographSample(double y)>;

HodographEvaluator soliton_evaluator(const SolitonEnsemble& e, double t);

/// Resamples u onto x_grid. The inverse map comes from monotone cubic
/// interpolation of x_of_y; with an evaluator each point is then polished by
/// Newton iteration on x(y) = x. Throws NumericalError if x_of_y is not
/// strictly increasing.
CVec invert_hodograph(SolitonField& f, const RVec& x_grid, const HodographEvaluator* exact = nullptr,
                      double tol = 1e-12);

/// y(x) for a sampled increasing map, monotone cubic inverse.
RVec inverse_map(const RVec& y, const RVec& x_of_y, const RVec& x_query);

/// Convenience: N-soliton profile u(x, t) on a uniform x grid.
CVec soliton_profile(const SolitonEnsemble& e, const Grid1D& x_grid, double t);

// ---------------------------------------------------------------------------
// Space-time cone

struct ConeSpec {
  double y1 = 0.0, y2 = 0.0;
  double v1 = -1.0, v2 = -0.5;

  void validate() const;
  double inner_radius_sq() const { return -1.0 / (4.0 * v1); }
  double outer_radius_sq() const { return -1.0 / (4.0 * v2); }
  /// Points of the cone are y = y0 - v t with y0 in [y1, y2], v in [v1, v2].
  bool contains(double y, double t) const;
};

enum class PoleClass { Inside, Faster, Slower };

struct ConeFilterResult {
  SolitonEnsemble inside;
  std::vector<std::size_t> inside_index;
  std::vector<PoleClass> classes;
  double mu = 0.0;  // +inf when nothing is excluded
  std::vector<std::string> warnings;
  std::vector<PoleDatum> faster;  // excluded poles entering c_k(I)
};

/// Distance from z to the annulus in |z|.
double annulus_distance(cplx z, const ConeSpec& cone);

ConeFilterResult cone_filter(const std::vector<PoleDatum>& poles, const ConeSpec& cone);

/// u(y, t) predicted from the cone-filtered ensemble, phase referred back to the
/// full data so that it is directly comparable with reconstruct_u on all poles.
ZeroLimit cone_field(const ConeFilterResult& filtered, double y, double t, const LimitOptions& opts = {});

}  // namespace csp::soliton
