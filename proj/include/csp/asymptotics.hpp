#pragma once

// Long-time asymptotics inside a space-time cone: stationary-phase geometry,
// the scalar conjugation T(z), parabolic-cylinder coefficients at +-z0, the
// first-order error expansion E(0), E1, and the assembled field.
//
// Two variants of the last three steps are provided. `Literal` follows the
// printed closed forms term by term. `Derived` re-derives them in the
// conventions of this code (jump V = [[1, r e^{2it theta}], [r* e^{-2it theta},
// 1 + |r|^2]], reconstruction at z = 0); it is the default and the one that
// agrees with direct simulation. README lists the differences.

#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "csp/num_core.hpp"
#include "csp/scattering_io.hpp"
#include "csp/soliton_engine.hpp"

namespace csp::asym {

/// t/(4y) <= 0: the field decays fast there and the cone formula does not apply.
class FastDecayRegion : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class InsufficientResolution : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// Outer model not invertible at a stationary point or at the origin.
class OuterModelSingular : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

enum class FormulaVariant { Derived, Literal };

struct PhaseContext {
  double y = 0.0, t = 0.0;
  double z0 = 0.0;
  int eta = 1;  // sign of t

  /// theta(z) = z (1/z0^2 + 1/z^2) / 4, so that 2 i t theta = 2 i (z y + t/(4z)).
  cplx theta(cplx z) const { return z / 4.0 * (1.0 / (z0 * z0) + 1.0 / (z * z)); }
};

PhaseContext phase_context(double y, double t);

struct ConjugationOptions {
  std::size_t min_samples = 200;  // r samples required inside [-z0, z0]
  double quad_tol = 1e-11;
  int max_depth = 30;
};

/// nu(s) = -log(1 + |r(s)|^2) / (2 pi) and everything built from it on [-z0, z0].
/// T(z) = prod_{|z_k| < z0} (z - z_k*)/(z - z_k) * delta(z),
/// delta(z) = exp(i int nu(s)/(s - z) ds).
class ConjugationData {
 public:
  ConjugationData(const ScatteringData& data, double z0, const ConjugationOptions& opts = {});

  double z0() const { return z0_; }
  double nu(double s) const;
  double nu_plus() const { return nu_plus_; }    // nu(z0)
  double nu_minus() const { return nu_minus_; }  // nu(-z0)
  const std::vector<PoleDatum>& delta_plus() const { return inner_; }  // poles with |z_k| < z0

  /// delta off the interval; exact conjugate symmetry delta*(z*) = 1/delta(z).
  cplx delta(cplx z) const;
  /// Boundary values on (-z0, z0) from the split form; side = +1 upper, -1 lower.
  cplx delta_boundary(double s, int side) const;
  cplx T(cplx z) const;
  cplx T_boundary(double s, int side) const;

  cplx delta0() const { return delta0_; }  // delta(0)
  cplx T0() const;                         // T(0)
  /// T'(0)/T(0) = -2i sum Im z_k/|z_k|^2 + i int nu/s^2.
  cplx T1() const;
  /// The printed closed form 2 sum Im z_k / z_k - int nu/s^2.
  cplx T1_literal() const;
  double int_nu_over_s2() const { return int_nu_s2_; }

  /// T(z) ~ T0(+z0) (z - z0)^{i nu(z0)} near z0 (principal power), and
  /// T(z) ~ T0(-z0) (z + z0)^{-i nu(-z0)} near -z0 with the power's cut along
  /// (-z0, +inf). |T0(+z0)| = 1, |T0(-z0)| = e^{-pi nu(-z0)}.
  cplx T0_plus() const { return t0_plus_; }
  cplx T0_minus() const { return t0_minus_; }

  /// Printed beta-phase integrals beta^{+-}(z, +-z0), characteristic function on
  /// a unit interval ending at the stationary point.
  cplx beta_phase(cplx z, int which) const;

 private:
  double integral(const std::function<double(double)>& f, double a, double b) const;
  cplx cauchy(cplx z) const;  // int nu/(s - z) off the interval

  const ScatteringData* data_;
  ConjugationOptions opts_;
  double z0_;
  std::vector<PoleDatum> inner_;
  double nu_plus_ = 0.0, nu_minus_ = 0.0;
  cplx delta0_ = 1.0;
  double int_nu_s2_ = 0.0;
  cplx t0_plus_ = 1.0, t0_minus_ = 1.0;
};

ConjugationData conjugation_data(const ScatteringData& data, const PhaseContext& ctx,
                                 const ConjugationOptions& opts = {});

struct PCCoefficients {
  cplx r0_plus = 0.0, r0_minus = 0.0;
  double nu_plus = 0.0, nu_minus = 0.0;
  cplx beta12_plus = 0.0, beta21_plus = 0.0;
  cplx beta12_minus = 0.0, beta21_minus = 0.0;
  Mat2 M1_plus = Mat2::zero(), M1_minus = Mat2::zero();  // M = I + M1/(i lambda) + ...
  FormulaVariant variant = FormulaVariant::Derived;
};

/// beta12 = sqrt(2 pi) e^{i pi/4} e^{-pi nu/2} / (r0 Gamma(-i nu)), beta21 its
/// partner (= nu / beta12); both vanish at r0 = 0.
std::pair<cplx, cplx> pc_betas(cplx r0);
/// nu of the model problem: -log(1 + |r0|^2) / (2 pi).
double pc_nu(cplx r0);

PCCoefficients pc_coefficients(const PhaseContext& ctx, const ConjugationData& cj, const ScatteringData& data,
                               FormulaVariant variant = FormulaVariant::Derived);

using MatrixFn = std::function<Mat2(cplx)>;

struct EExpansion {
  Mat2 E0, E1;
};

/// First-order E(0) and E1 from the outer model at +-z0.
EExpansion e_expansion(const MatrixFn& out_model, const PCCoefficients& pc, const PhaseContext& ctx);

struct AsymptoticSample {
  double x = 0.0, y = 0.0, t = 0.0, z0 = 0.0;
  cplx u = 0.0;           // full prediction
  cplx u_leading = 0.0;   // soliton term with its conjugation factors
  cplx correction = 0.0;  // t^{-1/2} radiation term
  double shift_T1 = 0.0;  // x - y contribution of T1
  double shift_f11 = 0.0; // x - y contribution of the t^{-1/2} term
  double error_order = 0.0;  // t^{-1}
};

struct TheoremOptions {
  FormulaVariant variant = FormulaVariant::Derived;
  double t_min = 10.0;
  double y_step = 0.0;  // 0 picks a step from the local wavelength
  ConjugationOptions conjugation;
};

/// Pointwise evaluation in the hodograph variable, with a per-z0 cache of
/// the conjugation data (keys quantised to 1e-6 in z0).
class TheoremEvaluator {
 public:
  TheoremEvaluator(const soliton::ConeSpec& cone, const ScatteringData& data, double t,
                   const TheoremOptions& opts = {});

  AsymptoticSample at_y(double y) const;
  const std::vector<std::string>& warnings() const { return warnings_; }
  std::size_t cache_size() const;

 private:
  std::shared_ptr<const ConjugationData> conjugation(double z0) const;
  void warn(const std::string& w) const;

  soliton::ConeSpec cone_;
  const ScatteringData* data_;
  double t_;
  TheoremOptions opts_;
  soliton::ConeFilterResult filtered_;
  cplx exp_d_full_ = 1.0;
  mutable std::mutex mu_;
  mutable std::map<long long, std::shared_ptr<const ConjugationData>> cache_;
  mutable std::vector<std::string> warnings_;
};

/// e^{d} = prod z_k/z_k* exp(-i int nu(s)/s ds) over the whole r grid.
cplx exp_d(const ScatteringData& data);

/// The assembled formula on every x of x_grid whose y(x, t) lies in the cone.
/// OpenMP-parallel over the hodograph samples.
std::vector<AsymptoticSample> theorem_formula(const soliton::ConeSpec& cone, const ScatteringData& data,
                                              const RVec& x_grid, double t, const TheoremOptions& opts = {},
                                              std::vector<std::string>* warnings = nullptr);

}  // namespace csp::asym
