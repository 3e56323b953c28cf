#include "csp/scattering_io.hpp"

#include <algorithm>
#include <fstream>

namespace csp {

namespace {

nlohmann::json pair(cplx v) { return nlohmann::json::array({v.real(), v.imag()}); }

cplx unpair(const nlohmann::json& j) {
  if (!j.is_array() || j.size() != 2) throw std::invalid_argument("scattering JSON: expected [re, im]");
  return {j[0].get<double>(), j[1].get<double>()};
}

}  // namespace

bool ScatteringData::reflectionless() const {
  return std::all_of(r.begin(), r.end(), [](cplx v) { return v == 0.0; });
}

cplx ScatteringData::reflection(double z) const {
  const std::size_t n = z_grid.size();
  if (n == 0 || z < z_grid.front() || z > z_grid.back()) return 0.0;
  if (n < 4) {
    auto it = std::lower_bound(z_grid.begin(), z_grid.end(), z);
    return r[std::min<std::size_t>(it - z_grid.begin(), n - 1)];
  }
  auto it = std::upper_bound(z_grid.begin(), z_grid.end(), z);
  std::size_t k = static_cast<std::size_t>(std::max<std::ptrdiff_t>(it - z_grid.begin() - 1, 0));
  std::size_t lo = std::clamp<std::size_t>(k == 0 ? 0 : k - 1, 0, n - 4);
  cplx acc = 0.0;
  for (std::size_t a = lo; a < lo + 4; ++a) {
    double w = 1.0;
    for (std::size_t b = lo; b < lo + 4; ++b)
      if (a != b) w *= (z - z_grid[b]) / (z_grid[a] - z_grid[b]);
    acc += w * r[a];
  }
  return acc;
}

ScatteringData make_scattering_data(const scatter::ScatteringSamples& samples,
                                    const scatter::DiscreteSpectrum& spectrum) {
  ScatteringData d;
  d.z_grid = samples.z_grid;
  d.r = samples.r;
  for (const auto& p : spectrum.poles) d.poles.push_back({p.z, p.c});
  return d;
}

nlohmann::json to_json(const ScatteringData& data) {
  nlohmann::json j;
  j["poles"] = nlohmann::json::array();
  for (const auto& p : data.poles) j["poles"].push_back({{"z", pair(p.z)}, {"c", pair(p.c)}});
  RVec re(data.r.size()), im(data.r.size());
  for (std::size_t i = 0; i < data.r.size(); ++i) {
    re[i] = data.r[i].real();
    im[i] = data.r[i].imag();
  }
  j["r"] = {{"z_grid", data.z_grid}, {"re", re}, {"im", im}};
  j["meta"] = data.meta;
  return j;
}

ScatteringData scattering_from_json(const nlohmann::json& j) {
  ScatteringData d;
  for (const auto& p : j.at("poles")) d.poles.push_back({unpair(p.at("z")), unpair(p.at("c"))});
  const auto& r = j.at("r");
  d.z_grid = r.at("z_grid").get<RVec>();
  const RVec re = r.at("re").get<RVec>(), im = r.at("im").get<RVec>();
  if (re.size() != d.z_grid.size() || im.size() != d.z_grid.size())
    throw std::invalid_argument("scattering JSON: r arrays differ in length");
  if (!std::is_sorted(d.z_grid.begin(), d.z_grid.end()))
    throw std::invalid_argument("scattering JSON: z_grid must be increasing");
  d.r.resize(re.size());
  for (std::size_t i = 0; i < re.size(); ++i) d.r[i] = {re[i], im[i]};
  if (j.contains("meta")) d.meta = j["meta"];
  for (const auto& p : d.poles)
    if (!(p.z.imag() > 0.0)) throw std::invalid_argument("scattering JSON: poles must lie in the upper half plane");
  return d;
}

void write_scattering_json(const std::string& path, const ScatteringData& data) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write " + path);
  f << to_json(data).dump(2) << '\n';
}

ScatteringData read_scattering_json(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot read " + path);
  return scattering_from_json(nlohmann::json::parse(f));
}

}  // namespace csp
