#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "commands.hpp"
#include "csp/csv.hpp"
#include "csp/scattering_io.hpp"

using namespace csp;
using namespace csp::cli;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const char* env = std::getenv("CSP_TEST_TMP");
  const fs::path root = env ? fs::path(env) : fs::temp_directory_path() / "csp_cli_tests";
  const fs::path dir = root / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

ExperimentConfig config(const fs::path& dir, json extra) {
  extra["out_dir"] = dir.string();
  return ExperimentConfig(extra);
}

json read_json(const fs::path& p) {
  std::ifstream is(p);
  json j;
  is >> j;
  return j;
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("flag values are typed") {
  CHECK(parse_value("12") == json(12));
  CHECK(parse_value("-0.25") == json(-0.25));
  CHECK(parse_value("1,2.5,-3") == json::array({1.0, 2.5, -3.0}));
  CHECK(parse_value("derived") == json("derived"));
  CHECK(parse_value("true") == json(true));
  CHECK(parse_value("a,b") == json("a,b"));
}

TEST_CASE("config accessors validate types") {
  ExperimentConfig c(json{{"n", 64}, {"dt", 0.1}, {"name", "x"}, {"times", {1, 2}}});
  CHECK(c.integer("n", 0) == 64);
  CHECK(c.number("dt", 0.0) == 0.1);
  CHECK(c.number("missing", 3.0) == 3.0);
  CHECK(c.numbers("times", {}) == std::vector<double>{1.0, 2.0});
  CHECK_THROWS_AS(c.number("name", 0.0), ConfigError);
  CHECK_THROWS_AS(c.integer("dt", 0), ConfigError);
  c.merge(json{{"dt", -1.0}});
  CHECK_THROWS_AS(c.positive("dt", 1.0), ConfigError);
  CHECK_THROWS_AS(ExperimentConfig(json::array()), ConfigError);
}

TEST_CASE("scatter on the zero profile") {
  const fs::path dir = scratch("scatter_zero");
  const RunResult r = run("scatter", config(dir, {{"profile", "zero"}, {"n", 256}, {"nz", 64}}));
  REQUIRE(r.status == Exit::Ok);
  const ScatteringData d = read_scattering_json((dir / "scattering.json").string());
  CHECK(d.poles.empty());
  REQUIRE(d.r.size() == 64);
  for (const auto& v : d.r) CHECK(std::abs(v) < 1e-10);
  CHECK(r.report["pole_count"] == 0);

  const json m = read_json(dir / "manifest_scatter.json");
  CHECK(m["manifest_version"] == 1);
  CHECK(m["status"] == 0);
  CHECK(m["config"]["profile"] == "zero");
  CHECK(m.contains("wall_time_s"));
  CHECK(m.contains("tool"));
}

TEST_CASE("configuration errors exit with status 2") {
  const fs::path dir = scratch("config_errors");
  CHECK(run("scatter", config(dir, {{"profile", "triangle"}})).status == Exit::Config);
  CHECK(run("scatter", config(dir, {{"n", "many"}})).status == Exit::Config);
  CHECK(run("evolve", config(dir, {{"n", 1000}})).status == Exit::Config);  // not a power of two
  CHECK(run("asymptote", config(dir, {})).status == Exit::Config);           // no scattering file
  CHECK(run("asymptote", config(dir, {{"scattering", "missing.json"}})).status == Exit::Config);
  CHECK(run("asymptote", config(dir, {{"scattering", "x.json"}, {"v1", -0.1}, {"v2", -0.2}})).status == Exit::Config);
  CHECK(run("roundtrip", config(dir, {{"poles", {0.3, -0.6}}})).status == Exit::Config);
  CHECK(run("frobnicate", config(dir, {})).status == Exit::Config);
  // the manifest records the failure
  const json m = read_json(dir / "manifest_roundtrip.json");
  CHECK(m["status"] == 2);
  CHECK_FALSE(m["message"].get<std::string>().empty());
}

TEST_CASE("numerical failures exit with status 3") {
  const fs::path dir = scratch("numerical");
  // a profile that does not decay at the grid ends
  const RunResult r = run("scatter", config(dir, {{"profile", "sech"}, {"width", 50.0}, {"n", 256}, {"nz", 16}}));
  CHECK(r.status == Exit::Numerical);
  CHECK(r.message.find("non-decaying") != std::string::npos);
}

TEST_CASE("roundtrip recovers the planted pole") {
  const fs::path dir = scratch("roundtrip");
  const RunResult r = run("roundtrip", config(dir, {{"poles", {{0.3, 0.6, 1.0, 0.0}}}}));
  CHECK(r.status == Exit::Ok);
  const json rep = read_json(dir / "roundtrip.json");
  CHECK(rep["max_pole_error"].get<double>() < 1e-6);
  CHECK(rep["max_c_relative_error"].get<double>() < 1e-4);
  CHECK(rep["max_abs_r"].get<double>() < 1e-6);
  CHECK(rep["winding_count"] == 1);

  // an impossible tolerance reports status 4
  const RunResult tight = run("roundtrip", config(dir, {{"poles", {0.3, 0.6}}, {"pole_tol", 1e-30}}));
  CHECK(tight.status == Exit::Tolerance);
}

TEST_CASE("solitons and evolve write field CSVs") {
  const fs::path dir = scratch("fields");
  ScatteringData d;
  d.poles = {{cplx(0.5, 0.3), 1.0}};
  write_scattering_json((dir / "one.json").string(), d);
  const RunResult s = run("solitons", config(dir, {{"scattering", (dir / "one.json").string()}, {"times", {0.0, 1.0}}, {"n", 64}}));
  REQUIRE(s.status == Exit::Ok);
  const std::string text = slurp(dir / "solitons.csv");
  CHECK(text.rfind("x,t,re_u,im_u\n", 0) == 0);
  CHECK(std::count(text.begin(), text.end(), '\n') == 1 + 2 * 64);

  const RunResult e = run("evolve", config(dir, {{"profile", "soliton"},
                                                 {"poles", {0.5, 0.3}},
                                                 {"x_min", -40.0},
                                                 {"x_max", 40.0},
                                                 {"n", 1024},
                                                 {"t_final", 1.0},
                                                 {"dt", 0.01},
                                                 {"output_times", {0.0, 1.0}}}));
  REQUIRE(e.status == Exit::Ok);
  CHECK(e.outputs.size() == 2);
  CHECK(e.report["I0_relative_drift"].get<double>() < 1e-6);
  const ProfileSamples last = read_profile_csv((dir / "evolve_t1.csv").string());
  CHECK(last.x.size() == 1024);
}

TEST_CASE("seeded runs reproduce from their manifest") {
  const fs::path a = scratch("repro_a"), b = scratch("repro_b");
  const json base{{"profile", "gaussian"}, {"amplitude", 0.1}, {"width", 2.0}, {"noise", 0.01},
                  {"seed", 42},           {"n", 512},          {"nz", 32}};
  const RunResult first = run("scatter", config(a, base));
  INFO(first.message);
  REQUIRE(first.status == Exit::Ok);
  ExperimentConfig again = ExperimentConfig::load((a / "manifest_scatter.json").string());
  again.set("out_dir", b.string());
  REQUIRE(run("scatter", again).status == Exit::Ok);
  CHECK(slurp(a / "scattering.json") == slurp(b / "scattering.json"));

  json other = base;
  other["seed"] = 43;
  const fs::path c = scratch("repro_c");
  REQUIRE(run("scatter", config(c, other)).status == Exit::Ok);
  CHECK(slurp(a / "scattering.json") != slurp(c / "scattering.json"));
}

TEST_CASE("asymptote on radiation data") {
  const fs::path dir = scratch("asymptote");
  REQUIRE(run("scatter", config(dir, {{"profile", "gaussian"},
                                      {"amplitude", 0.02},
                                      {"width", 4.0},
                                      {"k0", 3.0},
                                      {"n", 2048},
                                      {"nz", 801}}))
              .status == Exit::Ok);
  const RunResult r = run("asymptote", config(dir, {{"scattering", (dir / "scattering.json").string()},
                                                    {"t", 100.0},
                                                    {"n", 256}}));
  REQUIRE(r.status == Exit::Ok);
  CHECK(r.report["samples"].get<std::size_t>() > 10);
  const ProfileSamples s = read_profile_csv((dir / "asymptote.csv").string());
  for (std::size_t i = 1; i < s.x.size(); ++i) CHECK(s.x[i] > s.x[i - 1]);
}

TEST_CASE("compare: radiation-only decay exponent") {
  const fs::path dir = scratch("compare");
  const RunResult r = run("compare", config(dir, {{"profile", "gaussian"},
                                                  {"amplitude", 0.02},
                                                  {"width", 4.0},
                                                  {"k0", 3.0},
                                                  {"times", {100.0, 400.0}}}));
  CHECK(r.status == Exit::Ok);
  const double p = r.report["fitted_exponent"].get<double>();
  CHECK(p >= -1.5);
  CHECK(p <= -0.5);
  const std::string head = slurp(dir / "compare_t100.csv").substr(0, 64);
  CHECK(head.rfind("x,t,re_asym,im_asym,re_pde,im_pde,abs_diff\n", 0) == 0);
}
