// Serial reference vs OpenMP kernel timings. Each pair is also checked for
// identical output once before timing starts.

#include <benchmark/benchmark.h>
#include <omp.h>

#include <cstdio>
#include <cstdlib>

#include "csp/lax_scattering.hpp"
#include "csp/pde_oracle.hpp"
#include "csp/soliton_engine.hpp"

namespace {

using namespace csp;

const scatter::Potential& sech_potential() {
  static const scatter::Potential p = [] {
    Grid1D g(-40.0, 40.0, 2048);
    CVec u(g.size());
    const RVec x = g.points();
    for (std::size_t i = 0; i < x.size(); ++i) u[i] = 0.5 / std::cosh(x[i]) * std::exp(kI * 0.5 * x[i]);
    return scatter::Potential::build({g, u});
  }();
  return p;
}

RVec z_samples(std::size_t n) {
  RVec z(n);
  for (std::size_t k = 0; k < n; ++k) z[k] = -4.0 + 8.0 * (static_cast<double>(k) + 0.5) / static_cast<double>(n);
  return z;
}

soliton::SolitonEnsemble two_solitons() {
  soliton::SolitonEnsemble e;
  e.poles = {{cplx(0.6, 0.3), 1.0}, {cplx(-0.5, 0.25), cplx(0.5, 0.5)}};
  return e;
}

RVec y_samples(std::size_t n) {
  RVec y(n);
  for (std::size_t i = 0; i < n; ++i) y[i] = -30.0 + 60.0 * static_cast<double>(i) / static_cast<double>(n - 1);
  return y;
}

std::vector<pde::EvolutionState> batch(std::size_t members) {
  std::vector<pde::EvolutionState> out;
  Grid1D g(-40.0, 40.0 - 80.0 / 512.0, 512);
  const RVec x = g.points();
  for (std::size_t m = 0; m < members; ++m) {
    CVec u(x.size());
    const double a = 0.05 + 0.02 * static_cast<double>(m);
    for (std::size_t i = 0; i < x.size(); ++i) u[i] = a * std::exp(-x[i] * x[i] / 16.0) * std::exp(kI * 3.0 * x[i]);
    out.push_back({g, u, 0.0, 0.02});
  }
  return out;
}

void check_same(const char* what, double diff) {
  if (diff != 0.0) {
    std::fprintf(stderr, "%s: serial and parallel results differ by %g\n", what, diff);
    std::exit(1);
  }
}

void verify() {
  const RVec z = z_samples(64);
  const auto a = scatter::scattering_matrix(sech_potential(), z);
  const auto b = scatter::scattering_matrix_serial(sech_potential(), z);
  double d = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) d = std::max(d, std::abs(a.r[i] - b.r[i]));
  check_same("scattering_matrix", d);

  const RVec y = y_samples(256);
  const auto f = soliton::reconstruct_u(two_solitons(), y, 1.0);
  const auto g = soliton::reconstruct_u_serial(two_solitons(), y, 1.0);
  d = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) d = std::max(d, std::abs(f.u_of_y[i] - g.u_of_y[i]));
  check_same("reconstruct_u", d);

  const auto s = batch(2);
  const auto p = pde::evolve_batch(s, 1.0);
  const auto q = pde::evolve_batch_serial(s, 1.0);
  d = 0.0;
  for (std::size_t m = 0; m < s.size(); ++m)
    for (std::size_t i = 0; i < p[m].u.size(); ++i) d = std::max(d, std::abs(p[m].u[i] - q[m].u[i]));
  check_same("evolve_batch", d);
}

void BM_scatter_serial(benchmark::State& st) {
  const RVec z = z_samples(static_cast<std::size_t>(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(scatter::scattering_matrix_serial(sech_potential(), z));
}
void BM_scatter_parallel(benchmark::State& st) {
  const RVec z = z_samples(static_cast<std::size_t>(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(scatter::scattering_matrix(sech_potential(), z));
}

void BM_reconstruct_serial(benchmark::State& st) {
  const RVec y = y_samples(static_cast<std::size_t>(st.range(0)));
  const auto e = two_solitons();
  for (auto _ : st) benchmark::DoNotOptimize(soliton::reconstruct_u_serial(e, y, 1.0));
}
void BM_reconstruct_parallel(benchmark::State& st) {
  const RVec y = y_samples(static_cast<std::size_t>(st.range(0)));
  const auto e = two_solitons();
  for (auto _ : st) benchmark::DoNotOptimize(soliton::reconstruct_u(e, y, 1.0));
}

void BM_evolve_serial(benchmark::State& st) {
  const auto s = batch(static_cast<std::size_t>(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(pde::evolve_batch_serial(s, 1.0));
}
void BM_evolve_parallel(benchmark::State& st) {
  const auto s = batch(static_cast<std::size_t>(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(pde::evolve_batch(s, 1.0));
}

BENCHMARK(BM_scatter_serial)->Arg(64)->Arg(256)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_scatter_parallel)->Arg(64)->Arg(256)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_reconstruct_serial)->Arg(256)->Arg(1024)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_reconstruct_parallel)->Arg(256)->Arg(1024)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_evolve_serial)->Arg(4)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_evolve_parallel)->Arg(4)->Unit(benchmark::kMillisecond);

}  // namespace

int main(int argc, char** argv) {
  std::printf("OpenMP threads: %d\n", omp_get_max_threads());
  verify();
  benchmark::Initialize(&argc, argv);
  if (benchmark::ReportUnrecognizedArguments(argc, argv)) return 1;
  benchmark::RunSpecifiedBenchmarks();
  benchmark::Shutdown();
  return 0;
}
