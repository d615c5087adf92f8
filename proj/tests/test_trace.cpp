#include <doctest.h>

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "fracspec/approx.hpp"
#include "fracspec/cell_spectra.hpp"
#include "fracspec/fit.hpp"
#include "fracspec/geometry.hpp"
#include "fracspec/operator.hpp"
#include "fracspec/potential.hpp"
#include "fracspec/trace.hpp"

using namespace fracspec;

namespace {

PotentialField squared(const GraphApprox& g, MetricKind metric) {
  PotentialSpec s;
  s.kind = PotentialKind::power_distance;
  s.c = 1.0;
  s.beta = 2.0;
  s.metric = metric;
  return evaluate(s, g, distance_field(g, metric));
}

// Σ_{k∈ℤ} e^{−π²k²t} by Poisson summation: (πt)^{−1/2} Σ_n e^{−n²/t}.
double theta_sum(double t) {
  double s = 0;
  for (int n = -5; n <= 5; ++n) s += std::exp(-n * n / t);
  return s / std::sqrt(std::numbers::pi * t);
}

}  // namespace

TEST_CASE("unit-interval heat traces against theta-function values") {
  auto cells = interval_limit_cell_spectra(1e7);
  for (double t : {1e-3, 1e-2, 0.1}) {
    auto d = cell_trace(cells.dirichlet, t, cells.d_s);
    auto n = cell_trace(cells.neumann, t, cells.d_s);
    CHECK(d.value == doctest::Approx((theta_sum(t) - 1) / 2).epsilon(0.01));
    CHECK(n.value == doctest::Approx((theta_sum(t) + 1) / 2).epsilon(0.01));
    CHECK(n.value - d.value == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(d.tail_bound < 1e-12);
  }
  CHECK_THROWS_AS(cell_trace(cells.dirichlet, 1e-6, cells.d_s), std::domain_error);
  CHECK_THROWS(cell_trace(cells.dirichlet, 0.0, cells.d_s));
}

TEST_CASE("SG cell traces") {
  auto cells = sg_limit_cell_spectra(1e7);
  for (double t : geometric_grid(1e-5, 1e-1, 9)) {
    auto d = cell_trace(cells.dirichlet, t, cells.d_s);
    auto n = cell_trace(cells.neumann, t, cells.d_s);
    CHECK(n.value >= d.value);
    CHECK(d.value >= 0);
    CHECK(n.tail_bound >= 0);
    CHECK(n.tail_bound < 1e-6 * n.value);
  }
  // A complete discrete spectrum has no tail.
  auto level = sg_level_cell_spectra(3);
  auto op = assemble(refine(build_blowup(build_sg2_template(), {}, 0), 3), CellCoupling::dirichlet,
                     BoundaryCondition::dirichlet);
  auto dense = dense_spectrum(op);
  auto from_dense = cell_trace(dense, 1e-2);
  auto from_levels = cell_trace(level.dirichlet, 1e-2, level.d_s);
  CHECK(from_dense.value == doctest::Approx(from_levels.value).epsilon(1e-9));
  CHECK(from_levels.tail_bound == 0.0);
}

TEST_CASE("bracketed trace contains the glued trace") {
  const int m = 3;
  auto complex = build_blowup(build_sg2_template(), {1, 2, 3, 1}, 2);
  auto g = refine(complex, m);
  auto field = squared(g, MetricKind::cell_graph_scaled);
  auto cells = level_cell_spectra(complex.tmpl, m);
  auto grid = geometric_grid(1e-4, 1.0, 17);
  auto table = bracketed_trace(g, field, cells, grid);
  auto glued_d = dense_spectrum(assemble(g, CellCoupling::glued, BoundaryCondition::dirichlet, &field));
  auto glued_n = dense_spectrum(assemble(g, CellCoupling::glued, BoundaryCondition::neumann, &field));
  for (std::size_t i = 0; i < grid.size(); ++i) {
    double ld = cell_trace(glued_d, grid[i]).value, ln = cell_trace(glued_n, grid[i]).value;
    CHECK(table.l_lower[i] <= ld * (1 + 1e-12));
    CHECK(ld <= ln * (1 + 1e-12));
    CHECK(ln <= table.l_upper[i] * (1 + 1e-12));
    CHECK(table.f_lower[i] <= table.f_t[i] * (1 + 1e-12));
    CHECK(table.f_t[i] <= table.f_upper[i] * (1 + 1e-12));
    CHECK(table.rim_share[i] >= 0);
    CHECK(table.rim_share[i] <= 1);
  }
  auto f = factorization_ratio(table);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    CHECK(f.lower[i] <= f.ratio[i]);
    CHECK(f.ratio[i] <= f.upper[i]);
  }
}

TEST_CASE("reliable window") {
  auto complex = build_interval_lattice(200);
  auto g = refine(complex, 2);
  auto field = squared(g, MetricKind::euclidean_coordinate);
  const double cap = 1e6;
  auto table = bracketed_trace(g, field, interval_limit_cell_spectra(cap), geometric_grid(1e-4, 1e-1, 13));
  auto w = reliable_window(table, cap, 1e-6);
  CHECK(w.t_min_cap == doctest::Approx(kMinCapTimesT / cap));
  CHECK(w.t_min >= w.t_min_cap);
  CHECK(w.t_min >= w.t_min_rim);
  CHECK(w.t_max == doctest::Approx(1e-1));
  for (std::size_t i = 0; i < table.t.size(); ++i)
    if (table.t[i] >= w.t_min) CHECK(table.rim_share[i] <= 1e-6);
}

TEST_CASE("half-line oscillator trace grows like t^{-1}") {
  // Eigenvalues 4k − 1 give L(t) ≈ 1/(4t), so the fitted dimension is 2.
  auto complex = build_interval_lattice(400);
  auto g = refine(complex, 2);
  auto field = squared(g, MetricKind::euclidean_coordinate);
  auto table = bracketed_trace(g, field, interval_limit_cell_spectra(1e7), geometric_grid(1e-4, 1e-3, 9));
  CHECK(fit_spectral_dimension_t(table) == doctest::Approx(2.0).epsilon(0.02));
  for (std::size_t i = 0; i < table.t.size(); ++i) {
    double mid = 0.5 * (table.l_lower[i] + table.l_upper[i]);
    CHECK(mid * 4 * table.t[i] == doctest::Approx(1.0).epsilon(0.05));
  }
  auto narrow = bracketed_trace(g, field, interval_limit_cell_spectra(1e7), {1e-4, 2e-4});
  CHECK_THROWS(fit_spectral_dimension_t(narrow));
}
