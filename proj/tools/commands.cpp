#include "commands.hpp"

#include <omp.h>

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "csp/asymptotics.hpp"
#include "csp/csv.hpp"
#include "csp/lax_scattering.hpp"
#include "csp/pde_oracle.hpp"
#include "csp/scattering_io.hpp"
#include "csp/soliton_engine.hpp"

namespace csp::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kVersion = "csp_lab 1.0.0";

// ---------------------------------------------------------------------------
// config helpers

std::string fmt_time(double t) {
  std::ostringstream os;
  os << t;
  return os.str();
}

fs::path out_path(const ExperimentConfig& c, const std::string& name) {
  return fs::path(c.text("out_dir", ".")) / name;
}

std::vector<PoleDatum> poles_from(const ExperimentConfig& c, const std::string& key,
                                  const std::vector<PoleDatum>& fallback) {
  if (!c.has(key)) return fallback;
  const json& j = c.values().at(key);
  if (!j.is_array()) throw ConfigError(key + ": expected a list of [re, im, c_re, c_im]");
  // a flat list of numbers is one pole
  const bool flat = !j.empty() && j.front().is_number();
  std::vector<PoleDatum> out;
  auto one = [&](const json& p) {
    if (!p.is_array() || p.size() < 2 || p.size() > 4) throw ConfigError(key + ": each pole needs 2 to 4 numbers");
    for (const auto& v : p)
      if (!v.is_number()) throw ConfigError(key + ": non-numeric pole entry");
    const double cre = p.size() > 2 ? p[2].get<double>() : 1.0;
    const double cim = p.size() > 3 ? p[3].get<double>() : 0.0;
    out.push_back({cplx(p[0].get<double>(), p[1].get<double>()), cplx(cre, cim)});
  };
  if (flat)
    one(j);
  else
    for (const auto& p : j) one(p);
  for (const auto& p : out)
    if (!(p.z.imag() > 0.0)) throw ConfigError(key + ": poles must lie in the upper half plane");
  return out;
}

soliton::ConeSpec cone_from(const ExperimentConfig& c) {
  soliton::ConeSpec cone{c.number("y1", -5.0), c.number("y2", 5.0), c.number("v1", -0.14), c.number("v2", -0.085)};
  if (!(cone.v1 <= cone.v2 && cone.v2 < 0.0)) throw ConfigError("cone: need v1 <= v2 < 0");
  if (cone.y1 > cone.y2) throw ConfigError("cone: need y1 <= y2");
  if (cone.v1 == cone.v2) throw ConfigError("cone: v1 = v2 is empty");
  return cone;
}

std::size_t size_key(const ExperimentConfig& c, const std::string& key, long fallback) {
  const long n = c.integer(key, fallback);
  if (n < 8) throw ConfigError(key + " must be at least 8");
  return static_cast<std::size_t>(n);
}

Grid1D closed_grid(const ExperimentConfig& c, const std::string& prefix, double lo, double hi, long n) {
  const double a = c.number(prefix + "x_min", lo), b = c.number(prefix + "x_max", hi);
  if (!(b > a)) throw ConfigError(prefix + "x_max must exceed " + prefix + "x_min");
  return Grid1D(a, b, size_key(c, prefix + "n", n));
}

// periodic grid: n samples on [x_min, x_max)
Grid1D periodic_grid(const ExperimentConfig& c, double lo, double hi, long n) {
  const double a = c.number("x_min", lo), b = c.number("x_max", hi);
  const std::size_t m = size_key(c, "n", n);
  if (!(b > a)) throw ConfigError("x_max must exceed x_min");
  if ((m & (m - 1)) != 0) throw ConfigError("n must be a power of two for evolution");
  return Grid1D(a, b - (b - a) / static_cast<double>(m), m);
}

RVec z_grid(const ExperimentConfig& c, long nz_default) {
  const double a = c.number("z_min", -4.0), b = c.number("z_max", 4.0);
  const long nz = c.integer("nz", nz_default);
  if (!(b > a) || nz < 4) throw ConfigError("z grid needs z_max > z_min and nz >= 4");
  RVec z(static_cast<std::size_t>(nz));
  for (long k = 0; k < nz; ++k) z[k] = a + (b - a) * static_cast<double>(k) / static_cast<double>(nz - 1);
  return z;
}

scatter::SearchBox search_box(const ExperimentConfig& c) {
  scatter::SearchBox b{c.number("re_min", -3.0), c.number("re_max", 3.0), c.number("im_min", 0.05),
                       c.number("im_max", 3.0)};
  if (!(b.re_max > b.re_min && b.im_max > b.im_min && b.im_min > 0.0)) throw ConfigError("invalid search box");
  return b;
}

ScatteringData scattering_input(const ExperimentConfig& c, const std::string& sub) {
  if (!c.has("scattering")) throw ConfigError(sub + ": 'scattering' (JSON path) is required");
  const std::string path = c.text("scattering", "");
  if (!fs::is_regular_file(path)) throw ConfigError(sub + ": scattering file not found: " + path);
  return read_scattering_json(path);
}

// ---------------------------------------------------------------------------
// profiles

CVec profile_on(const ExperimentConfig& c, const Grid1D& g) {
  const std::string type = c.text("profile", "sech");
  const RVec x = g.points();
  CVec u(x.size(), 0.0);
  const double amp = c.number("amplitude", 0.5), width = c.positive("width", 1.0);
  const double k0 = c.number("k0", 0.0), x0 = c.number("center", 0.0);
  if (type == "zero") {
  } else if (type == "sech") {
    for (std::size_t i = 0; i < x.size(); ++i)
      u[i] = amp / std::cosh((x[i] - x0) / width) * std::exp(kI * k0 * (x[i] - x0));
  } else if (type == "gaussian") {
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double s = (x[i] - x0) / width;
      u[i] = amp * std::exp(-s * s) * std::exp(kI * k0 * (x[i] - x0));
    }
  } else if (type == "soliton") {
    soliton::SolitonEnsemble e;
    e.poles = poles_from(c, "poles", {{cplx(0.6, 0.3), 1.0}});
    u = soliton::soliton_profile(e, g, c.number("t0", 0.0));
  } else if (type == "csv") {
    const ProfileSamples s = read_profile_csv(c.text("profile_csv", ""));
    if (s.x.size() < 4) throw ConfigError("profile_csv: too few rows");
    // linear resampling onto the working grid, zero outside the file's range
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (x[i] < s.x.front() || x[i] > s.x.back()) continue;
      auto it = std::upper_bound(s.x.begin(), s.x.end(), x[i]);
      const std::size_t k = std::min<std::size_t>(std::max<std::ptrdiff_t>(it - s.x.begin() - 1, 0), s.x.size() - 2);
      const double w = (x[i] - s.x[k]) / (s.x[k + 1] - s.x[k]);
      u[i] = (1.0 - w) * s.u[k] + w * s.u[k + 1];
    }
  } else {
    throw ConfigError("unknown profile type '" + type + "' (zero, sech, gaussian, soliton, csv)");
  }

  const double noise = c.number("noise", 0.0);
  if (noise != 0.0) {
    std::mt19937_64 rng(static_cast<std::uint64_t>(c.integer("seed", 1)));
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> wave(-3.0, 3.0);
    for (int j = 0; j < 8; ++j) {
      const cplx a(gauss(rng), gauss(rng));
      const double k = wave(rng);
      for (std::size_t i = 0; i < x.size(); ++i)
        u[i] += noise * a * std::exp(kI * k * x[i]) / std::cosh((x[i] - x0) / width);
    }
  }
  return u;
}

// ---------------------------------------------------------------------------
// subcommands

scatter::Potential potential_from(const ExperimentConfig& c, const Grid1D& g) {
  scatter::PotentialOptions po;
  const std::string d = c.text("derivative", "spectral");
  if (d == "fd4")
    po.derivative = scatter::DerivativeMethod::FiniteDifference4;
  else if (d != "spectral")
    throw ConfigError("derivative must be spectral or fd4");
  po.decay_threshold = c.positive("decay_tol", 1e-8);
  return scatter::Potential::build({g, profile_on(c, g)}, po);
}

ScatteringData scatter_profile(const ExperimentConfig& c, const Grid1D& g, RunResult& res) {
  const scatter::Potential p = potential_from(c, g);
  const scatter::ScatteringSamples s = scatter::scattering_matrix(p, z_grid(c, 400));
  for (std::size_t i = 0; i < s.errors.size(); ++i)
    if (!s.errors[i].empty()) res.warnings.push_back("z = " + fmt_time(s.z_grid[i]) + ": " + s.errors[i]);
  const scatter::DiscreteSpectrum spec = scatter::find_discrete_spectrum(p, search_box(c));
  for (const auto& w : spec.warnings) res.warnings.push_back(w);
  double defect = 0.0, rmax = 0.0;
  for (std::size_t i = 0; i < s.r.size(); ++i) {
    defect = std::max(defect, std::abs(std::norm(s.s22[i]) + std::norm(s.s12[i]) - 1.0));
    rmax = std::max(rmax, std::abs(s.r[i]));
  }
  res.report["max_abs_r"] = rmax;
  res.report["unitarity_defect"] = defect;
  res.report["winding_count"] = spec.winding_count;
  res.report["pole_count"] = spec.poles.size();
  return make_scattering_data(s, spec);
}

void cmd_scatter(const ExperimentConfig& c, RunResult& res) {
  const Grid1D g = closed_grid(c, "", -40.0, 40.0, 2048);
  const ScatteringData d = scatter_profile(c, g, res);
  const fs::path out = out_path(c, c.text("output", "scattering.json"));
  write_scattering_json(out.string(), d);
  res.outputs.push_back(out.string());
}

void cmd_solitons(const ExperimentConfig& c, RunResult& res) {
  const ScatteringData d = scattering_input(c, "solitons");
  double rmax = 0.0;
  for (const auto& v : d.r) rmax = std::max(rmax, std::abs(v));
  if (rmax > 1e-8) res.warnings.push_back("reflection max " + fmt_time(rmax) + " ignored; soliton part only");
  soliton::SolitonEnsemble e;
  e.poles = d.poles;
  const Grid1D g = closed_grid(c, "", -20.0, 20.0, 512);
  const fs::path out = out_path(c, c.text("output", "solitons.csv"));
  bool first = true;
  for (double t : c.numbers("times", {0.0})) {
    const CVec u = e.size() ? soliton::soliton_profile(e, g, t) : CVec(g.size(), 0.0);
    write_field_csv(out.string(), g.points(), t, u, !first);
    first = false;
  }
  res.outputs.push_back(out.string());
  res.report["pole_count"] = e.size();
}

void cmd_evolve(const ExperimentConfig& c, RunResult& res) {
  const Grid1D g = periodic_grid(c, -50.0, 50.0, 1024);
  const double t_final = c.positive("t_final", 1.0);
  pde::EvolutionState st{g, profile_on(c, g), 0.0, c.positive("dt", 0.01)};
  pde::EvolveOptions opts;
  opts.output_times = c.numbers("output_times", {t_final});
  for (double t : opts.output_times)
    if (t < 0.0 || t > t_final) throw ConfigError("output_times must lie in [0, t_final]");
  const std::string prefix = c.text("output", "evolve");
  const double i0 = pde::conserved_i0(g, st.u);
  opts.on_output = [&](const pde::EvolutionState& s) {
    const fs::path out = out_path(c, prefix + "_t" + fmt_time(s.t) + ".csv");
    write_field_csv(out.string(), g.points(), s.t, s.u);
    res.outputs.push_back(out.string());
  };
  if (std::find(opts.output_times.begin(), opts.output_times.end(), 0.0) != opts.output_times.end())
    opts.on_output(st);
  pde::EvolveReport rep;
  const pde::EvolutionState fin = pde::evolve(st, t_final, opts, &rep);
  const double i1 = pde::conserved_i0(g, fin.u);
  for (const auto& w : rep.warnings) res.warnings.push_back(w);
  res.report["steps"] = rep.steps;
  res.report["I0_initial"] = i0;
  res.report["I0_final"] = i1;
  res.report["I0_relative_drift"] = i0 != 0.0 ? std::abs(i1 - i0) / std::abs(i0) : std::abs(i1);
  res.report["boundary_peak"] = rep.boundary_peak;
}

asym::TheoremOptions theorem_options(const ExperimentConfig& c) {
  asym::TheoremOptions o;
  const std::string v = c.text("variant", "derived");
  if (v == "literal")
    o.variant = asym::FormulaVariant::Literal;
  else if (v != "derived")
    throw ConfigError("variant must be derived or literal");
  o.t_min = c.number("t_min", 10.0);
  o.conjugation.min_samples = static_cast<std::size_t>(c.integer("min_samples", 200));
  o.conjugation.quad_tol = c.positive("quad_tol", 1e-11);
  return o;
}

void cmd_asymptote(const ExperimentConfig& c, RunResult& res) {
  const soliton::ConeSpec cone = cone_from(c);
  const ScatteringData d = scattering_input(c, "asymptote");
  const double t = c.positive("t", 100.0);
  const Grid1D g = closed_grid(c, "", 0.0, 100.0, 1024);
  std::vector<std::string> warns;
  const auto samples = asym::theorem_formula(cone, d, g.points(), t, theorem_options(c), &warns);
  res.warnings.insert(res.warnings.end(), warns.begin(), warns.end());
  RVec x;
  CVec u;
  for (const auto& s : samples) {
    x.push_back(s.x);
    u.push_back(s.u);
  }
  const fs::path out = out_path(c, c.text("output", "asymptote.csv"));
  write_field_csv(out.string(), x, t, u);
  res.outputs.push_back(out.string());
  res.report["samples"] = samples.size();
}

// Least-squares slope of log e against log t.
double fitted_exponent(const RVec& t, const RVec& e) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(t.size());
  for (std::size_t i = 0; i < t.size(); ++i) {
    const double lx = std::log(t[i]), ly = std::log(e[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

void cmd_compare(const ExperimentConfig& c, RunResult& res) {
  ExperimentConfig sc = c;  // scattering grid under its own keys
  sc.set("x_min", c.number("scatter_x_min", -40.0));
  sc.set("x_max", c.number("scatter_x_max", 40.0));
  sc.set("n", c.integer("scatter_n", 2048));
  if (!c.has("nz")) sc.set("nz", 801);
  const ScatteringData d = scatter_profile(sc, closed_grid(sc, "", -40.0, 40.0, 2048), res);
  const fs::path sj = out_path(c, "compare_scattering.json");
  write_scattering_json(sj.string(), d);
  res.outputs.push_back(sj.string());

  const soliton::ConeSpec cone = cone_from(c);
  RVec times = c.numbers("times", {100.0, 400.0});
  std::sort(times.begin(), times.end());
  if (times.empty() || times.front() <= 0.0) throw ConfigError("times must be positive");
  const Grid1D g = periodic_grid(c, -100.0, 700.0, 4096);
  pde::EvolutionState st{g, profile_on(c, g), 0.0, c.positive("dt", 0.05)};
  const asym::TheoremOptions to = theorem_options(c);

  RVec errs;
  json per_time = json::array();
  for (double t : times) {
    pde::EvolveReport rep;
    st = pde::evolve(st, t, {}, &rep);
    for (const auto& w : rep.warnings) res.warnings.push_back("t = " + fmt_time(t) + ": " + w);
    std::vector<std::string> warns;
    const auto samples = asym::theorem_formula(cone, d, g.points(), t, to, &warns);
    for (const auto& w : warns) res.warnings.push_back("t = " + fmt_time(t) + ": " + w);
    if (samples.empty()) throw NumericalError("compare: no grid point inside the cone at t = " + fmt_time(t));
    std::vector<ComparisonRow> rows;
    double e = 0.0;
    for (const auto& s : samples) {
      const auto i = static_cast<std::size_t>(std::lround((s.x - g.x_min()) / g.h()));
      rows.push_back({s.x, t, s.u, st.u[i]});
      e = std::max(e, std::abs(s.u - st.u[i]));
    }
    const fs::path out = out_path(c, c.text("output", "compare") + "_t" + fmt_time(t) + ".csv");
    write_comparison_csv(out.string(), rows);
    res.outputs.push_back(out.string());
    errs.push_back(e);
    per_time.push_back({{"t", t}, {"max_abs_diff", e}, {"samples", samples.size()}, {"pde_steps", rep.steps}});
  }
  res.report["times"] = per_time;
  if (times.size() >= 2) {
    const double p = fitted_exponent(times, errs);
    const double lo = c.number("exponent_min", -1.5), hi = c.number("exponent_max", -0.5);
    res.report["fitted_exponent"] = p;
    res.report["exponent_window"] = {lo, hi};
    if (!(p >= lo && p <= hi)) {
      res.status = Exit::Tolerance;
      res.message = "fitted exponent " + fmt_time(p) + " outside [" + fmt_time(lo) + ", " + fmt_time(hi) + "]";
    }
  }
}

void cmd_roundtrip(const ExperimentConfig& c, RunResult& res) {
  soliton::SolitonEnsemble e;
  e.poles = poles_from(c, "poles", {{cplx(0.3, 0.6), 1.0}});
  e.validate();
  const Grid1D yg = closed_grid(c, "", -40.0, 40.0, 2048);
  const soliton::SolitonField f = soliton::reconstruct_u(e, yg.points(), 0.0);
  // curve form keeps loop profiles (x(y) not monotone) in reach
  const scatter::Potential p = scatter::Potential::build_parametric(yg, f.x_of_y, f.u_of_y);
  const scatter::DiscreteSpectrum spec = scatter::find_discrete_spectrum(p, search_box(c));
  const scatter::ScatteringSamples s = scatter::scattering_matrix(p, z_grid(c, 400));
  double rmax = 0.0;
  for (const auto& v : s.r) rmax = std::max(rmax, std::abs(v));

  const double pole_tol = c.positive("pole_tol", 1e-6), c_tol = c.positive("c_tol", 1e-4),
               r_tol = c.positive("r_tol", 1e-6);
  json rows = json::array();
  double zerr = 0.0, cerr = 0.0;
  bool matched = spec.poles.size() == e.size();
  for (const auto& planted : e.poles) {
    const scatter::DiscretePole* best = nullptr;
    for (const auto& q : spec.poles)
      if (!best || std::abs(q.z - planted.z) < std::abs(best->z - planted.z)) best = &q;
    if (!best) {
      matched = false;
      rows.push_back({{"planted", {planted.z.real(), planted.z.imag()}}, {"recovered", nullptr}});
      continue;
    }
    const double dz = std::abs(best->z - planted.z), dc = std::abs(best->c - planted.c) / std::abs(planted.c);
    zerr = std::max(zerr, dz);
    cerr = std::max(cerr, dc);
    rows.push_back({{"planted", {planted.z.real(), planted.z.imag(), planted.c.real(), planted.c.imag()}},
                    {"recovered", {best->z.real(), best->z.imag(), best->c.real(), best->c.imag()}},
                    {"pole_error", dz},
                    {"c_relative_error", dc}});
  }
  res.report["poles"] = rows;
  res.report["max_pole_error"] = zerr;
  res.report["max_c_relative_error"] = cerr;
  res.report["max_abs_r"] = rmax;
  res.report["winding_count"] = spec.winding_count;
  const fs::path out = out_path(c, c.text("output", "roundtrip.json"));
  {
    std::ofstream os(out);
    if (!os) throw std::runtime_error("cannot write " + out.string());
    os << res.report.dump(2) << '\n';
  }
  res.outputs.push_back(out.string());
  if (!matched || zerr > pole_tol || cerr > c_tol || rmax > r_tol) {
    res.status = Exit::Tolerance;
    std::ostringstream os;
    os << "round trip outside tolerance: pole " << zerr << " (" << pole_tol << "), c " << cerr << " (" << c_tol
       << "), max|r| " << rmax << " (" << r_tol << ")" << (matched ? "" : ", pole count mismatch");
    res.message = os.str();
  }
}

json tolerances_of(const ExperimentConfig& c) {
  json t = json::object();
  for (const auto& [k, v] : c.values().items())
    if (k.find("tol") != std::string::npos || k.rfind("exponent_", 0) == 0) t[k] = v;
  return t;
}

}  // namespace

// ---------------------------------------------------------------------------

ExperimentConfig::ExperimentConfig(json values) : values_(std::move(values)) {
  if (!values_.is_object()) throw ConfigError("configuration must be a JSON object");
}

ExperimentConfig ExperimentConfig::load(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot read config " + path);
  json j;
  try {
    is >> j;
  } catch (const json::parse_error& e) {
    throw ConfigError(path + ": " + e.what());
  }
  if (j.is_object() && j.contains("manifest_version") && j.contains("config")) return ExperimentConfig(j["config"]);
  return ExperimentConfig(j);
}

void ExperimentConfig::merge(const json& overrides) {
  if (!overrides.is_object()) throw ConfigError("overrides must be an object");
  for (const auto& [k, v] : overrides.items()) values_[k] = v;
}

double ExperimentConfig::number(const std::string& key, double fallback) const {
  if (!has(key)) return fallback;
  const json& v = values_.at(key);
  if (!v.is_number()) throw ConfigError(key + ": expected a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) throw ConfigError(key + ": not finite");
  return d;
}

long ExperimentConfig::integer(const std::string& key, long fallback) const {
  if (!has(key)) return fallback;
  const json& v = values_.at(key);
  if (v.is_number_integer()) return v.get<long>();
  if (v.is_number_float() && std::floor(v.get<double>()) == v.get<double>()) return static_cast<long>(v.get<double>());
  throw ConfigError(key + ": expected an integer");
}

std::string ExperimentConfig::text(const std::string& key, const std::string& fallback) const {
  if (!has(key)) return fallback;
  const json& v = values_.at(key);
  if (!v.is_string()) throw ConfigError(key + ": expected a string");
  return v.get<std::string>();
}

std::vector<double> ExperimentConfig::numbers(const std::string& key, const std::vector<double>& fallback) const {
  if (!has(key)) return fallback;
  const json& v = values_.at(key);
  if (v.is_number()) return {v.get<double>()};
  if (!v.is_array()) throw ConfigError(key + ": expected a list of numbers");
  std::vector<double> out;
  for (const auto& e : v) {
    if (!e.is_number()) throw ConfigError(key + ": expected a list of numbers");
    out.push_back(e.get<double>());
  }
  return out;
}

double ExperimentConfig::positive(const std::string& key, double fallback) const {
  const double v = number(key, fallback);
  if (!(v > 0.0)) throw ConfigError(key + " must be positive");
  return v;
}

json parse_value(const std::string& text) {
  if (text.find(',') != std::string::npos) {
    json arr = json::array();
    std::stringstream ss(text);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(cell, &used);
      } catch (const std::exception&) {
        return text;
      }
      if (used != cell.size()) return text;
      arr.push_back(v);
    }
    return arr;
  }
  try {
    std::size_t used = 0;
    const long i = std::stol(text, &used);
    if (used == text.size()) return i;
    const double d = std::stod(text, &used);
    if (used == text.size()) return d;
  } catch (const std::exception&) {
  }
  if (text == "true") return true;
  if (text == "false") return false;
  return text;
}

const std::vector<std::string>& subcommands() {
  static const std::vector<std::string> names{"scatter", "solitons", "evolve", "asymptote", "compare", "roundtrip"};
  return names;
}

RunResult run(const std::string& subcommand, const ExperimentConfig& config) {
  RunResult res;
  const auto start = std::chrono::steady_clock::now();
  try {
    if (config.has("jobs")) {
      const long jobs = config.integer("jobs", 1);
      if (jobs < 1) throw ConfigError("jobs must be at least 1");
      omp_set_num_threads(static_cast<int>(jobs));
    }
    const fs::path dir = config.text("out_dir", ".");
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) throw ConfigError("out_dir not writable: " + dir.string());

    if (subcommand == "scatter")
      cmd_scatter(config, res);
    else if (subcommand == "solitons")
      cmd_solitons(config, res);
    else if (subcommand == "evolve")
      cmd_evolve(config, res);
    else if (subcommand == "asymptote")
      cmd_asymptote(config, res);
    else if (subcommand == "compare")
      cmd_compare(config, res);
    else if (subcommand == "roundtrip")
      cmd_roundtrip(config, res);
    else
      throw ConfigError("unknown subcommand '" + subcommand + "'");
  } catch (const ConfigError& e) {
    res.status = Exit::Config;
    res.message = e.what();
  } catch (const std::invalid_argument& e) {
    res.status = Exit::Config;
    res.message = e.what();
  } catch (const json::exception& e) {
    res.status = Exit::Config;
    res.message = e.what();
  } catch (const std::exception& e) {
    res.status = Exit::Numerical;
    res.message = e.what();
  }
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  if (res.status == Exit::Config && res.message.find("out_dir") != std::string::npos) return res;
  json m;
  m["manifest_version"] = 1;
  m["tool"] = kVersion;
  m["subcommand"] = subcommand;
  m["config"] = config.values();
  m["tolerances"] = tolerances_of(config);
  m["threads"] = omp_get_max_threads();
  m["wall_time_s"] = wall;
  m["status"] = static_cast<int>(res.status);
  m["message"] = res.message;
  m["outputs"] = res.outputs;
  m["warnings"] = res.warnings;
  m["report"] = res.report;
  try {
    const fs::path mp = fs::path(config.text("out_dir", ".")) / ("manifest_" + subcommand + ".json");
    std::ofstream os(mp);
    if (os) os << m.dump(2) << '\n';
  } catch (const std::exception&) {
  }
  return res;
}

}  // namespace csp::cli
