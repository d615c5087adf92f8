#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "fracspec/approx.hpp"
#include "fracspec/bohr.hpp"
#include "fracspec/cell_spectra.hpp"
#include "fracspec/fit.hpp"
#include "fracspec/geometry.hpp"
#include "fracspec/potential.hpp"

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

}  // namespace

TEST_CASE("layer-cake integral on closed-form examples") {
  auto linear = WeylFunction::power_law(2.0, 1.0);  // W(λ) = λ
  auto root = WeylFunction::power_law(1.0, 1.0);    // W(λ) = λ^{1/2}
  auto step = StepFunction::from_jumps({{3.0, 1.0}});
  for (double lam : {0.5, 3.0, 3.5, 10.0, 100.0}) {
    CHECK(bohr_g_layercake(step, linear, lam) == doctest::Approx(std::max(lam - 3.0, 0.0)).epsilon(1e-9));
    CHECK(bohr_g_layercake(step, root, lam) == doctest::Approx(std::sqrt(std::max(lam - 3.0, 0.0))).epsilon(1e-9));
  }
  // Arbitrary discrete distribution: the integral is Σ w_j W(λ − v_j).
  std::mt19937 rng(2);
  std::uniform_real_distribution<double> val(0.0, 50.0), wt(0.1, 2.0);
  std::vector<std::pair<double, double>> jumps;
  for (int i = 0; i < 200; ++i) jumps.emplace_back(val(rng), wt(rng));
  auto f = StepFunction::from_jumps(jumps);
  for (double lam : {5.0, 25.0, 60.0}) {
    double direct = 0;
    for (auto [v, w] : jumps)
      if (v < lam) direct += w * root(lam - v);
    CHECK(bohr_g_layercake(f, root, lam) == doctest::Approx(direct).epsilon(1e-8));
  }
}

TEST_CASE("zero potential on one cell gives g = W") {
  auto g = refine(build_blowup(build_sg2_template(), {}, 0), 3);
  auto field = PotentialField::zero(g);
  auto cells = sg_limit_cell_spectra(1e6);
  auto w = template_weyl(cells, 4);
  auto grid = geometric_grid(10, 1e5, 15);
  auto b = bohr_g(field, g, w, cells, grid);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    CHECK(b.g[i] == doctest::Approx(w(grid[i])).epsilon(1e-12));
    CHECK(b.g_sup[i] == doctest::Approx(b.g[i]).epsilon(1e-12));
    CHECK(b.g_inf[i] == doctest::Approx(b.g[i]).epsilon(1e-12));
  }
}

TEST_CASE("bracket identities and ordering on a blow-up") {
  const int m = 4;
  auto complex = build_blowup(build_sg2_template(), {1, 2, 3, 1, 2}, 3);
  auto g = refine(complex, m);
  auto field = squared(g, MetricKind::cell_graph_scaled);
  auto cells = level_cell_spectra(complex.tmpl, m);
  auto w = template_weyl(sg_limit_cell_spectra(1e8), 4);
  CountingProblem problem(g, field, cells, true);
  auto grid = geometric_grid(5, 2000, 30);
  auto counts = problem.count_grid(grid);
  auto b = bohr_g(field, g, w, cells, grid);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const auto& c = counts[i];
    REQUIRE(c.direct.has_value());
    CHECK(c.lower <= *c.direct);
    CHECK(*c.direct <= c.upper);
    CHECK(*c.direct <= *c.direct_neumann);
    CHECK(*c.direct_neumann <= c.upper);
    if (c.rim_certified) CHECK(*c.direct == *c.direct_neumann);
    // N^b = g^b + 𝓡^b term by term.
    CHECK(b.g_sup[i] + b.r_sup[i] == doctest::Approx(static_cast<double>(c.lower)).epsilon(1e-12).scale(1.0));
    CHECK(b.g_inf[i] + b.r_inf[i] == doctest::Approx(static_cast<double>(c.upper)).epsilon(1e-12).scale(1.0));
    CHECK(b.g_sup[i] <= b.g[i] + 1e-9);
    CHECK(b.g[i] <= b.g_inf[i] + 1e-9);
    if (i > 0) {
      CHECK(b.g[i] >= b.g[i - 1]);
      CHECK(b.g_sup[i] >= b.g_sup[i - 1]);
      CHECK(b.g_inf[i] >= b.g_inf[i - 1]);
      CHECK(c.lower >= counts[i - 1].lower);
      CHECK(c.upper >= counts[i - 1].upper);
    }
    // Quadrature over the distribution equals the vertex sum.
    auto f = distribution(field, g, DistributionKind::exact);
    CHECK(bohr_g_layercake(f, w, grid[i]) == doctest::Approx(b.g[i]).epsilon(1e-6).scale(1e-9));
  }
  auto one = bracketed_count(complex, m, PotentialSpec{PotentialKind::power_distance, 1.0, 2.0,
                                                       MetricKind::cell_graph_scaled, {}, 0},
                             grid[10]);
  CHECK(one.lower == counts[10].lower);
  CHECK(one.upper == counts[10].upper);
  CHECK(one.direct == counts[10].direct);
}

TEST_CASE("half-line oscillator: N and g both grow like λ/4") {
  // −u'' + x²u on [0, ∞) with u(0) = 0 has eigenvalues 4k − 1, and
  // ∫_0^{√λ} (λ − x²)^{1/2}/π dx = λ/4.
  const int m = 6;
  auto complex = build_interval_lattice(40);
  auto g = refine(complex, m);
  auto field = squared(g, MetricKind::euclidean_coordinate);
  auto cells = level_cell_spectra(complex.tmpl, m);
  auto w = template_weyl(interval_limit_cell_spectra(1e7));
  auto grid = geometric_grid(40, 400, 12);
  auto b = bohr_g(field, g, w, cells, grid);
  CountingProblem problem(g, field, cells, true);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    CHECK(b.g[i] == doctest::Approx(grid[i] / 4).epsilon(0.01));
    auto c = problem.count(grid[i]);
    CHECK(static_cast<double>(*c.direct) == doctest::Approx(std::floor((grid[i] + 1) / 4)).epsilon(1e-9).scale(1.0));
    double bound = bohr_error_bound_at(b, i);
    CHECK(std::abs(static_cast<double>(*c.direct) / b.g[i] - 1) <= bound + 1e-12);
  }
  auto bounds = bohr_error_bound(b);
  CHECK(bounds.back() < bounds.front());
}

TEST_CASE("error bound is undefined below the spectrum") {
  BohrFunction b;
  b.lambda = {1.0};
  b.g = b.g_sup = b.g_inf = b.r_sup = b.r_inf = {0.0};
  CHECK_THROWS_AS(bohr_error_bound(b), std::domain_error);
}

TEST_CASE("trailing period average") {
  auto grid = geometric_grid(1, 1000, 31);
  std::vector<double> ones(grid.size(), 2.5);
  auto avg = period_average(grid, ones, 5.0);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (grid[i] < 5.0 * (1 - 1e-9)) CHECK(std::isnan(avg[i]));
    else CHECK(avg[i] == doctest::Approx(2.5));
  }
  std::vector<double> falling;
  for (double l : grid) falling.push_back(1 / l);
  CHECK(nonincreasing_over_top_decade(grid, falling));
  std::vector<double> rising(grid.begin(), grid.end());
  CHECK_FALSE(nonincreasing_over_top_decade(grid, rising));
  CHECK(nonincreasing_over_top_decade(grid, rising, 1e9));
  CHECK_THROWS(period_average(grid, ones, 1.0));
}

TEST_CASE("weak Bohr check") {
  auto same = StepFunction::from_jumps({{1.0, 1.0}, {4.0, 3.0}, {9.0, 5.0}});
  auto r = weak_bohr_check(same, same, geometric_grid(2, 50, 10), [](double l) { return l; });
  CHECK(r.pass);
  for (double v : r.inf_over_sup) CHECK(v == 1.0);

  // Cell k has V^∨ = k and V^∧ = k + √k, so the envelopes differ by a relative λ^{-1/2}.
  std::vector<std::pair<double, double>> sup_jumps, inf_jumps;
  for (int k = 1; k <= 200000; ++k) {
    sup_jumps.emplace_back(k * 1.0 + std::sqrt(k), 1.0);
    inf_jumps.emplace_back(k * 1.0, 1.0);
  }
  auto fs = StepFunction::from_jumps(sup_jumps), fi = StepFunction::from_jumps(inf_jumps);
  auto w = weak_bohr_check(fs, fi, geometric_grid(100, 1e5, 30));
  CHECK(w.top_decade_slope < 0);
  CHECK(w.pass);
  CHECK_THROWS(weak_bohr_check(fs, fi, {10.0}, [](double l) { return l / 2; }));
}

TEST_CASE("dimension fits") {
  auto grid = geometric_grid(10, 1e4, 20);
  std::vector<double> counts;
  for (double l : grid) counts.push_back(3 * std::pow(l, 0.7));
  CHECK(fit_dimension(grid, counts) == doctest::Approx(1.4).epsilon(1e-9));
  CHECK_THROWS(fit_dimension({10, 20}, {1, 2}));

  std::vector<BracketedCount> bc;
  for (double l : grid) {
    BracketedCount c;
    c.lambda = l;
    c.lower = static_cast<std::int64_t>(std::floor(l / 4));
    c.upper = static_cast<std::int64_t>(std::ceil(l / 4)) + 1;
    bc.push_back(c);
  }
  auto fit = fit_spectral_dimension(bc);
  CHECK(fit.d_s == doctest::Approx(2.0).epsilon(0.05));
  CHECK(fit.d_s_lower == doctest::Approx(2.0).epsilon(0.05));
  CHECK(fit.confidence >= 0);
}
