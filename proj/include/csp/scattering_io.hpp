#pragma once

// Scattering-data interchange: reflection samples on a real grid plus the
// discrete spectrum, serialised as JSON.

#include <string>
#include <vector>

#include <json.hpp>

#include "csp/lax_scattering.hpp"

namespace csp {

struct PoleDatum {
  cplx z;
  cplx c;
};

struct ScatteringData {
  std::vector<PoleDatum> poles;
  RVec z_grid;
  CVec r;
  nlohmann::json meta = nlohmann::json::object();

  bool reflectionless() const;
  /// r(z) by cubic interpolation on the sample grid; zero outside it.
  cplx reflection(double z) const;
};

ScatteringData make_scattering_data(const scatter::ScatteringSamples& samples,
                                    const scatter::DiscreteSpectrum& spectrum);

nlohmann::json to_json(const ScatteringData& data);
ScatteringData scattering_from_json(const nlohmann::json& j);

void write_scattering_json(const std::string& path, const ScatteringData& data);
ScatteringData read_scattering_json(const std::string& path);

}  // namespace csp
