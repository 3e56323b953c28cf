#include "csp/csv.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace csp {

namespace {

std::ofstream open_out(const std::string& path, bool append) {
  std::ofstream os(path, append ? std::ios::app : std::ios::trunc);
  if (!os) throw std::runtime_error("cannot write " + path);
  os.precision(17);
  return os;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    while (!cell.empty() && (cell.back() == '\r' || cell.back() == ' ')) cell.pop_back();
    while (!cell.empty() && cell.front() == ' ') cell.erase(cell.begin());
    out.push_back(cell);
  }
  return out;
}

}  // namespace

void write_field_csv(const std::string& path, const RVec& x, double t, const CVec& u, bool append) {
  if (x.size() != u.size()) throw std::invalid_argument("write_field_csv: size mismatch");
  const bool header = !append || !std::ifstream(path).good();
  std::ofstream os = open_out(path, append);
  if (header) os << "x,t,re_u,im_u\n";
  for (std::size_t i = 0; i < x.size(); ++i) os << x[i] << ',' << t << ',' << u[i].real() << ',' << u[i].imag() << '\n';
}

void write_comparison_csv(const std::string& path, const std::vector<ComparisonRow>& rows) {
  std::ofstream os = open_out(path, false);
  os << "x,t,re_asym,im_asym,re_pde,im_pde,abs_diff\n";
  for (const auto& r : rows)
    os << r.x << ',' << r.t << ',' << r.asym.real() << ',' << r.asym.imag() << ',' << r.pde.real() << ','
       << r.pde.imag() << ',' << std::abs(r.asym - r.pde) << '\n';
}

ProfileSamples read_profile_csv(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot read " + path);
  std::string line;
  if (!std::getline(is, line)) throw std::runtime_error(path + ": empty file");
  const auto head = split(line);
  int ix = -1, ire = -1, iim = -1;
  for (std::size_t i = 0; i < head.size(); ++i) {
    if (head[i] == "x") ix = static_cast<int>(i);
    if (head[i] == "re_u") ire = static_cast<int>(i);
    if (head[i] == "im_u") iim = static_cast<int>(i);
  }
  if (ix < 0 || ire < 0 || iim < 0) throw std::runtime_error(path + ": header needs x, re_u, im_u");
  ProfileSamples s;
  std::size_t row = 1;
  while (std::getline(is, line)) {
    ++row;
    if (line.empty()) continue;
    const auto cells = split(line);
    const auto need = static_cast<std::size_t>(std::max({ix, ire, iim}));
    if (cells.size() <= need) throw std::runtime_error(path + ": short row " + std::to_string(row));
    try {
      s.x.push_back(std::stod(cells[ix]));
      s.u.emplace_back(std::stod(cells[ire]), std::stod(cells[iim]));
    } catch (const std::exception&) {
      throw std::runtime_error(path + ": bad number in row " + std::to_string(row));
    }
  }
  return s;
}

}  // namespace csp
