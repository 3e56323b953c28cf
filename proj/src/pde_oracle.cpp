#include "csp/pde_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace csp::pde {

namespace {

bool is_power_of_two(std::size_t n) { return n >= 2 && (n & (n - 1)) == 0; }

double max_abs(const CVec& u) {
  double m = 0.0;
  for (const auto& v : u) m = std::max(m, std::abs(v));
  return m;
}

}  // namespace

void EvolutionState::validate() const {
  if (!is_power_of_two(grid.size())) throw std::invalid_argument("evolution grid size must be a power of two");
  if (u.size() != grid.size()) throw std::invalid_argument("evolution state: u and grid sizes differ");
  if (!(dt > 0.0)) throw std::invalid_argument("evolution state: dt must be positive");
  if (!(dealias_fraction > 0.0 && dealias_fraction <= 1.0))
    throw std::invalid_argument("evolution state: dealias fraction must lie in (0, 1]");
}

SpectralOps::SpectralOps(const Grid1D& grid, double dealias_fraction)
    : n_(grid.size()), k_(wavenumbers(grid.size(), grid.h() * static_cast<double>(grid.size()))),
      kept_(grid.size(), true), plan_(grid.size()) {
  const double kmax = kPi / grid.h();
  for (std::size_t i = 0; i < n_; ++i)
    kept_[i] = std::abs(k_[i]) <= dealias_fraction * kmax * (1.0 + 1e-12) && !(n_ % 2 == 0 && i == n_ / 2);
}

CVec SpectralOps::forward(const CVec& u) const {
  CVec out;
  plan_.forward(u, out);
  const double s = 1.0 / static_cast<double>(n_);
  for (auto& v : out) v *= s;
  return out;
}

CVec SpectralOps::backward(const CVec& uh) const {
  CVec out;
  plan_.backward(uh, out);
  return out;
}

CVec SpectralOps::derivative(const CVec& u) const {
  CVec uh = forward(u);
  for (std::size_t i = 0; i < n_; ++i) uh[i] *= kI * k_[i];
  return backward(uh);
}

CVec SpectralOps::nonlinear_hat(const CVec& uh) const {
  CVec dh(n_);
  for (std::size_t i = 0; i < n_; ++i) dh[i] = kI * k_[i] * uh[i];
  const CVec u = backward(uh);
  const CVec ux = backward(dh);
  CVec w(n_);
  for (std::size_t i = 0; i < n_; ++i) w[i] = -0.5 * std::norm(u[i]) * ux[i];
  CVec wh = forward(w);
  for (std::size_t i = 0; i < n_; ++i)
    if (!kept_[i]) wh[i] = 0.0;
  wh[0] = 0.0;
  return wh;
}

CVec rhs(const Grid1D& grid, const CVec& u, double dealias_fraction, std::vector<std::string>* warnings,
         double mean_tolerance) {
  SpectralOps ops(grid, dealias_fraction);
  CVec uh = ops.forward(u);
  if (std::abs(uh[0]) > mean_tolerance && warnings) {
    std::ostringstream os;
    os << "nonzero mean " << std::abs(uh[0]) << " projected out";
    warnings->push_back(os.str());
  }
  uh[0] = 0.0;
  CVec out = ops.nonlinear_hat(uh);
  const RVec& k = ops.k();
  for (std::size_t i = 1; i < out.size(); ++i)
    if (k[i] != 0.0) out[i] += kI / k[i] * uh[i];
  return ops.backward(out);
}

double boundary_magnitude(const CVec& u) {
  const std::size_t n = u.size();
  const std::size_t edge = std::max<std::size_t>(1, n / 10);
  double m = 0.0;
  for (std::size_t i = 0; i < edge; ++i) m = std::max({m, std::abs(u[i]), std::abs(u[n - 1 - i])});
  return m;
}

double conserved_i0(const Grid1D& grid, const CVec& u) {
  SpectralOps ops(grid, 1.0);
  const CVec ux = ops.derivative(u);
  double acc = 0.0;
  for (const auto& v : ux) {
    const double a = std::norm(v);
    acc += a / (std::sqrt(1.0 + a) + 1.0);  // sqrt(1+a) - 1 without cancellation
  }
  return acc * grid.h();
}

EvolutionState evolve(EvolutionState state, double t_final, const EvolveOptions& opts, EvolveReport* report) {
  state.validate();
  EvolveReport local;
  EvolveReport& rep = report ? *report : local;
  if (t_final < state.t) throw std::invalid_argument("evolve: t_final precedes the current time");

  const double edge0 = boundary_magnitude(state.u);
  if (edge0 > opts.initial_decay) {
    std::ostringstream os;
    os << "initial datum not decayed on the outer 10% (" << edge0 << ")";
    rep.warnings.push_back(os.str());
  }
  rep.boundary_peak = std::max(rep.boundary_peak, edge0);

  const std::size_t n = state.grid.size();
  SpectralOps ops(state.grid, state.dealias_fraction);
  const RVec& k = ops.k();
  const double u0max = std::max(max_abs(state.u), 1e-300);

  CVec v = ops.forward(state.u);
  if (std::abs(v[0]) > opts.mean_tolerance) {
    std::ostringstream os;
    os << "nonzero mean " << std::abs(v[0]) << " projected out";
    rep.warnings.push_back(os.str());
  }
  v[0] = 0.0;

  std::vector<double> stops;
  for (double to : opts.output_times)
    if (to > state.t && to < t_final) stops.push_back(to);
  std::sort(stops.begin(), stops.end());
  stops.push_back(t_final);

  bool warned_boundary = false;
  CVec e_half(n), e_full(n), a(n), b(n);
  for (double stop : stops) {
    const double span = stop - state.t;
    if (span <= 0.0) continue;
    const auto steps = static_cast<std::size_t>(std::ceil(span / state.dt - 1e-9));
    const double h = span / static_cast<double>(steps);
    for (std::size_t i = 0; i < n; ++i) {
      const double lam = (k[i] != 0.0) ? 1.0 / k[i] : 0.0;  // linear symbol i/k
      e_half[i] = std::exp(kI * lam * (0.5 * h));
      e_full[i] = e_half[i] * e_half[i];
    }
    for (std::size_t s = 0; s < steps; ++s) {
      const CVec k1 = ops.nonlinear_hat(v);
      for (std::size_t i = 0; i < n; ++i) a[i] = e_half[i] * (v[i] + 0.5 * h * k1[i]);
      const CVec k2 = ops.nonlinear_hat(a);
      for (std::size_t i = 0; i < n; ++i) b[i] = e_half[i] * v[i] + 0.5 * h * k2[i];
      const CVec k3 = ops.nonlinear_hat(b);
      for (std::size_t i = 0; i < n; ++i) a[i] = e_full[i] * v[i] + h * e_half[i] * k3[i];
      const CVec k4 = ops.nonlinear_hat(a);
      for (std::size_t i = 0; i < n; ++i)
        v[i] = e_full[i] * v[i] + h / 6.0 * (e_full[i] * k1[i] + 2.0 * e_half[i] * (k2[i] + k3[i]) + k4[i]);
      rep.max_mean_mode = std::max(rep.max_mean_mode, std::abs(v[0]));
      v[0] = 0.0;
      ++rep.steps;
      state.t += h;

      if (rep.steps % 16 == 0 || s + 1 == steps) {
        const CVec u = ops.backward(v);
        const double umax = max_abs(u);
        if (!std::isfinite(umax) || umax > opts.blowup_factor * u0max) {
          std::ostringstream os;
          os << "blow-up guard tripped at t = " << state.t << " (max|u| = " << umax << ")";
          throw BlowUpError(os.str(), state.t);
        }
        const double edge = boundary_magnitude(u);
        rep.boundary_peak = std::max(rep.boundary_peak, edge);
        if (edge > opts.boundary_warning && !warned_boundary) {
          std::ostringstream os;
          os << "boundary contamination: outer 10% reached " << edge << " at t = " << state.t;
          rep.warnings.push_back(os.str());
          warned_boundary = true;
        }
      }
    }
    state.t = stop;
    state.u = ops.backward(v);
    if (stop != t_final && opts.on_output) opts.on_output(state);
  }
  state.u = ops.backward(v);
  state.t = t_final;
  if (opts.on_output && std::find(opts.output_times.begin(), opts.output_times.end(), t_final) !=
                            opts.output_times.end())
    opts.on_output(state);
  return state;
}

std::vector<EvolutionState> evolve_batch(const std::vector<EvolutionState>& states, double t_final,
                                         const EvolveOptions& opts) {
  std::vector<EvolutionState> out(states.size());
  std::vector<std::string> errors(states.size());
#pragma omp parallel for schedule(dynamic)
  for (std::size_t i = 0; i < states.size(); ++i) {
    try {
      EvolveOptions local = opts;
      local.on_output = nullptr;  // callbacks are not thread-safe in general
      out[i] = evolve(states[i], t_final, local);
    } catch (const std::exception& e) {
      errors[i] = e.what();
    }
  }
  for (std::size_t i = 0; i < errors.size(); ++i)
    if (!errors[i].empty()) throw NumericalError("batch member " + std::to_string(i) + ": " + errors[i]);
  return out;
}

std::vector<EvolutionState> evolve_batch_serial(const std::vector<EvolutionState>& states, double t_final,
                                                const EvolveOptions& opts) {
  std::vector<EvolutionState> out;
  out.reserve(states.size());
  EvolveOptions local = opts;
  local.on_output = nullptr;
  for (const auto& s : states) out.push_back(evolve(s, t_final, local));
  return out;
}

}  // namespace csp::pde
