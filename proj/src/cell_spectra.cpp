#include "fracspec/cell_spectra.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace fracspec {

namespace {

StepFunction counting_from(const std::vector<std::pair<double, std::int64_t>>& values, double cap) {
  std::vector<std::pair<double, double>> jumps;
  for (const auto& [v, k] : values)
    if (v <= cap) jumps.emplace_back(v, static_cast<double>(k));
  return StepFunction::from_jumps(std::move(jumps), 0.0, cap);
}

constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

CellSpectra sg_level_cell_spectra(int m) {
  if (m < 0) throw std::invalid_argument("negative refinement level");
  CellSpectra c;
  c.template_name = "sg2";
  c.level = m;
  c.discrete = true;
  c.cap = kInf;
  if (m >= 1) c.dirichlet = counting_from(level_cell_eigenvalues(BoundaryCondition::dirichlet, m), kInf);
  c.neumann = counting_from(level_cell_eigenvalues(BoundaryCondition::neumann, m), kInf);
  c.d_s = 2 * std::log(3.0) / std::log(5.0);
  c.period = kSgPeriod;
  return c;
}

CellSpectra sg_limit_cell_spectra(double cap) {
  CellSpectra c;
  c.template_name = "sg2";
  c.cap = cap;
  c.dirichlet = single_cell_counting(enumerate_sg_spectrum(BoundaryCondition::dirichlet, cap));
  c.neumann = single_cell_counting(enumerate_sg_spectrum(BoundaryCondition::neumann, cap));
  c.d_s = 2 * std::log(3.0) / std::log(5.0);
  c.period = kSgPeriod;
  return c;
}

CellSpectra interval_level_cell_spectra(int m) {
  if (m < 0 || m > 24) throw std::invalid_argument("interval refinement level out of range");
  const std::int64_t n = std::int64_t{1} << m;
  const double h = 1.0 / static_cast<double>(n);
  auto eig = [h](std::int64_t k) {
    double s = std::sin(static_cast<double>(k) * std::numbers::pi * h / 2);
    return 4.0 / (h * h) * s * s;
  };
  std::vector<std::pair<double, std::int64_t>> d, nn;
  for (std::int64_t k = 1; k < n; ++k) d.emplace_back(eig(k), 1);
  for (std::int64_t k = 0; k <= n; ++k) nn.emplace_back(eig(k), 1);
  CellSpectra c;
  c.template_name = "interval";
  c.level = m;
  c.discrete = true;
  c.cap = kInf;
  c.dirichlet = counting_from(d, kInf);
  c.neumann = counting_from(nn, kInf);
  c.d_s = 1.0;
  return c;
}

CellSpectra interval_limit_cell_spectra(double cap) {
  if (!(cap > 0)) throw std::invalid_argument("cap must be positive");
  std::vector<std::pair<double, std::int64_t>> d, nn{{0.0, 1}};
  for (std::int64_t k = 1;; ++k) {
    double v = std::pow(static_cast<double>(k) * std::numbers::pi, 2);
    if (v > cap) break;
    d.emplace_back(v, 1);
    nn.emplace_back(v, 1);
  }
  CellSpectra c;
  c.template_name = "interval";
  c.cap = cap;
  c.dirichlet = counting_from(d, cap);
  c.neumann = counting_from(nn, cap);
  c.d_s = 1.0;
  return c;
}

CellSpectra level_cell_spectra(const Template& tmpl, int m) {
  if (tmpl.name == "sg2") return sg_level_cell_spectra(m);
  if (tmpl.name == "interval") return interval_level_cell_spectra(m);
  throw std::invalid_argument("no single-cell spectrum for template " + tmpl.name);
}

CellSpectra limit_cell_spectra(const Template& tmpl, double cap) {
  if (tmpl.name == "sg2") return sg_limit_cell_spectra(cap);
  if (tmpl.name == "interval") return interval_limit_cell_spectra(cap);
  throw std::invalid_argument("no single-cell spectrum for template " + tmpl.name);
}

WeylFunction template_weyl(const CellSpectra& limit, int folds) {
  if (limit.template_name == "interval") return WeylFunction::power_law(1.0, 1.0 / std::numbers::pi);
  if (limit.discrete) throw std::invalid_argument("Weyl function needs the limit spectrum");
  return weyl_from_counting(limit.neumann, limit.d_s, limit.period, folds);
}

}  // namespace fracspec
