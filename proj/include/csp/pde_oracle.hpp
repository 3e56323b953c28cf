#pragma once

// Periodic pseudospectral integrator for u_xt + u + (|u|^2 u_x)_x / 2 = 0,
// written as u_t = -d_x^{-1} u - |u|^2 u_x / 2 with the zero-mean antiderivative.
// The stiff linear part i/k is handled by an integrating factor, the rest by
// classical RK4 with 2/3-rule dealiasing.

#include <functional>
#include <string>
#include <vector>

#include "csp/fft.hpp"
#include "csp/num_core.hpp"

namespace csp::pde {

struct EvolutionState {
  Grid1D grid;  // samples x_0 .. x_{n-1}; the period is n * h
  CVec u;
  double t = 0.0;
  double dt = 1e-2;
  double dealias_fraction = 2.0 / 3.0;

  void validate() const;
  double period() const { return grid.h() * static_cast<double>(grid.size()); }
};

struct EvolveOptions {
  double blowup_factor = 1e3;       // abort when max|u| exceeds this times its initial value
  double boundary_warning = 1e-5;   // outer 10% magnitude that triggers a warning
  double initial_decay = 1e-8;      // required outer 10% magnitude at the start
  double mean_tolerance = 1e-10;    // |mean(u)| above this is projected out with a warning
  std::vector<double> output_times; // snapshots passed to on_output
  std::function<void(const EvolutionState&)> on_output;
};

struct EvolveReport {
  std::size_t steps = 0;
  double max_mean_mode = 0.0;  // largest |u_hat(0)| / n seen after projection
  double boundary_peak = 0.0;  // largest outer-10% magnitude seen
  std::vector<std::string> warnings;
};

/// Raised by the blow-up guard; carries the time of failure.
class BlowUpError : public NumericalError {
 public:
  BlowUpError(const std::string& what, double t) : NumericalError(what), t_(t) {}
  double time() const { return t_; }

 private:
  double t_;
};

/// Reusable spectral operators for one grid.
class SpectralOps {
 public:
  SpectralOps(const Grid1D& grid, double dealias_fraction = 2.0 / 3.0);

  std::size_t size() const { return n_; }
  const RVec& k() const { return k_; }
  const std::vector<bool>& kept() const { return kept_; }

  CVec forward(const CVec& u) const;   // normalised: u_hat = fft(u) / n
  CVec backward(const CVec& uh) const; // inverse of forward
  CVec derivative(const CVec& u) const;
  /// Nonlinear term -|u|^2 u_x / 2 in Fourier space, dealiased, mean removed.
  CVec nonlinear_hat(const CVec& uh) const;

 private:
  std::size_t n_;
  RVec k_;
  std::vector<bool> kept_;
  FFTPlan plan_;
};

/// du/dt for the evolution form. Input with a mean above `mean_tolerance` is
/// projected onto zero mean and a warning appended.
CVec rhs(const Grid1D& grid, const CVec& u, double dealias_fraction = 2.0 / 3.0,
         std::vector<std::string>* warnings = nullptr, double mean_tolerance = 1e-10);

/// Integrating-factor RK4 from state.t to t_final.
EvolutionState evolve(EvolutionState state, double t_final, const EvolveOptions& opts = {},
                      EvolveReport* report = nullptr);

/// Independent evolutions in parallel (OpenMP over states).
std::vector<EvolutionState> evolve_batch(const std::vector<EvolutionState>& states, double t_final,
                                         const EvolveOptions& opts = {});
std::vector<EvolutionState> evolve_batch_serial(const std::vector<EvolutionState>& states, double t_final,
                                                const EvolveOptions& opts = {});

/// I0 = int (sqrt(1 + |u_x|^2) - 1) dx over one period, spectral u_x.
double conserved_i0(const Grid1D& grid, const CVec& u);

/// Max |u| over the outer 10% of the grid on both sides.
double boundary_magnitude(const CVec& u);

}  // namespace csp::pde
