#pragma once

// Plain CSV output for fields and comparisons, and a reader for profile files.
//
// Column contracts:
//   field       x,t,re_u,im_u
//   comparison  x,t,re_asym,im_asym,re_pde,im_pde,abs_diff

#include <string>
#include <vector>

#include "csp/num_core.hpp"

namespace csp {

void write_field_csv(const std::string& path, const RVec& x, double t, const CVec& u, bool append = false);

struct ComparisonRow {
  double x = 0.0, t = 0.0;
  cplx asym = 0.0, pde = 0.0;
};

void write_comparison_csv(const std::string& path, const std::vector<ComparisonRow>& rows);

struct ProfileSamples {
  RVec x;
  CVec u;
};

/// Reads x,re_u,im_u (header required; extra columns such as t are ignored).
ProfileSamples read_profile_csv(const std::string& path);

}  // namespace csp
