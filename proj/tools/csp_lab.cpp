// csp_lab: experiment runner.
//
//   csp_lab [--config FILE] [--jobs N] [--out-dir DIR] <subcommand> [flags] [--set key=value ...]
//
// Exit status: 0 ok, 2 configuration error, 3 numerical failure,
// 4 comparison outside tolerance.

#include <CLI11.hpp>

#include <iostream>
#include <map>

#include "commands.hpp"

namespace {

using csp::cli::Exit;
using nlohmann::json;

struct Flags {
  std::map<std::string, std::string> values;   // key -> raw text
  std::vector<std::string> sets;               // key=value
  std::vector<std::string> poles;              // re,im[,c_re,c_im]
};

void add_flag(CLI::App* app, Flags& f, const std::string& name, const std::string& key, const std::string& help) {
  app->add_option_function<std::string>(
      name, [&f, key](const std::string& v) { f.values[key] = v; }, help);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Scattering, soliton, PDE and long-time asymptotics experiments"};
  app.require_subcommand(1);
  std::string config_path, out_dir;
  long jobs = 0;
  app.add_option("--config", config_path, "JSON config (or a previous manifest)");
  app.add_option("--jobs", jobs, "worker threads")->check(CLI::PositiveNumber);
  app.add_option("--out-dir", out_dir, "directory for outputs and the manifest");

  Flags flags;
  const std::map<std::string, std::string> descriptions{
      {"scatter", "profile -> scattering JSON"},
      {"solitons", "scattering JSON + x grid + times -> field CSV"},
      {"evolve", "profile + t_final -> snapshot CSVs"},
      {"asymptote", "scattering JSON + cone + t -> asymptotic field CSV"},
      {"compare", "asymptote vs evolve -> difference CSVs and decay exponent"},
      {"roundtrip", "planted poles -> scatter -> recovered poles report"}};

  for (const auto& name : csp::cli::subcommands()) {
    CLI::App* sub = app.add_subcommand(name, descriptions.at(name));
    sub->add_option("--set", flags.sets, "generic override key=value (lists as a,b,c)");
    add_flag(sub, flags, "--output", "output", "output file (or prefix)");
    add_flag(sub, flags, "--x-min", "x_min", "grid start");
    add_flag(sub, flags, "--x-max", "x_max", "grid end");
    add_flag(sub, flags, "-n,--n", "n", "grid size");
    add_flag(sub, flags, "--seed", "seed", "seed for randomised profile noise");
    if (name == "scatter" || name == "evolve" || name == "compare") {
      add_flag(sub, flags, "--profile", "profile", "zero | sech | gaussian | soliton | csv");
      add_flag(sub, flags, "--amplitude", "amplitude", "profile amplitude");
      add_flag(sub, flags, "--width", "width", "profile width");
      add_flag(sub, flags, "--k0", "k0", "carrier wavenumber");
      add_flag(sub, flags, "--profile-csv", "profile_csv", "CSV with x,re_u,im_u");
      add_flag(sub, flags, "--noise", "noise", "amplitude of seeded random modes");
    }
    if (name == "scatter" || name == "roundtrip" || name == "compare") {
      add_flag(sub, flags, "--z-min", "z_min", "reflection grid start");
      add_flag(sub, flags, "--z-max", "z_max", "reflection grid end");
      add_flag(sub, flags, "--nz", "nz", "reflection grid size");
    }
    if (name == "solitons" || name == "asymptote") add_flag(sub, flags, "--scattering", "scattering", "scattering JSON");
    if (name == "solitons") add_flag(sub, flags, "--times", "times", "comma-separated times");
    if (name == "evolve") {
      add_flag(sub, flags, "--t-final", "t_final", "final time");
      add_flag(sub, flags, "--dt", "dt", "time step");
      add_flag(sub, flags, "--output-times", "output_times", "comma-separated snapshot times");
    }
    if (name == "asymptote" || name == "compare") {
      add_flag(sub, flags, "--y1", "y1", "cone y1");
      add_flag(sub, flags, "--y2", "y2", "cone y2");
      add_flag(sub, flags, "--v1", "v1", "cone v1");
      add_flag(sub, flags, "--v2", "v2", "cone v2");
      add_flag(sub, flags, "--variant", "variant", "derived | literal");
    }
    if (name == "asymptote") add_flag(sub, flags, "--t", "t", "time");
    if (name == "compare") {
      add_flag(sub, flags, "--times", "times", "comma-separated comparison times");
      add_flag(sub, flags, "--dt", "dt", "PDE time step");
    }
    if (name == "roundtrip" || name == "solitons" || name == "evolve")
      sub->add_option("--pole", flags.poles, "re,im[,c_re,c_im] (repeatable)");
    if (name == "roundtrip") {
      add_flag(sub, flags, "--pole-tol", "pole_tol", "pole tolerance");
      add_flag(sub, flags, "--c-tol", "c_tol", "relative norming-constant tolerance");
      add_flag(sub, flags, "--r-tol", "r_tol", "max |r| tolerance");
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : static_cast<int>(Exit::Config);
  }
  const std::string subcommand = app.get_subcommands().front()->get_name();

  csp::cli::ExperimentConfig config;
  try {
    if (!config_path.empty()) config = csp::cli::ExperimentConfig::load(config_path);
    json over = json::object();
    for (const auto& [k, v] : flags.values) over[k] = csp::cli::parse_value(v);
    for (const auto& s : flags.sets) {
      const auto eq = s.find('=');
      if (eq == std::string::npos || eq == 0) throw csp::cli::ConfigError("--set expects key=value, got '" + s + "'");
      over[s.substr(0, eq)] = csp::cli::parse_value(s.substr(eq + 1));
    }
    if (!flags.poles.empty()) {
      json list = json::array();
      for (const auto& p : flags.poles) list.push_back(csp::cli::parse_value(p));
      over["poles"] = list;
    }
    if (jobs > 0) over["jobs"] = jobs;
    if (!out_dir.empty()) over["out_dir"] = out_dir;
    config.merge(over);
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return static_cast<int>(Exit::Config);
  }

  const csp::cli::RunResult r = csp::cli::run(subcommand, config);
  for (const auto& w : r.warnings) std::cerr << "warning: " << w << '\n';
  for (const auto& o : r.outputs) std::cout << o << '\n';
  if (!r.report.empty()) std::cout << r.report.dump(2) << '\n';
  switch (r.status) {
    case Exit::Ok: break;
    case Exit::Config: std::cerr << "config error: " << r.message << '\n'; break;
    case Exit::Numerical: std::cerr << "numerical failure: " << r.message << '\n'; break;
    case Exit::Tolerance: std::cerr << "tolerance exceeded: " << r.message << '\n'; break;
  }
  return static_cast<int>(r.status);
}
