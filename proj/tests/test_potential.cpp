#include <doctest.h>

#include <algorithm>
#include <cmath>

#include <Eigen/SparseCore>

#include "fracspec/approx.hpp"
#include "fracspec/fit.hpp"
#include "fracspec/geometry.hpp"
#include "fracspec/potential.hpp"

using namespace fracspec;

namespace {

PotentialSpec power(double c, double beta, MetricKind metric) {
  PotentialSpec s;
  s.kind = PotentialKind::power_distance;
  s.c = c;
  s.beta = beta;
  s.metric = metric;
  return s;
}

PotentialField eval(const PotentialSpec& s, const GraphApprox& g, const CellComplex* c = nullptr) {
  return evaluate(s, g, distance_field(g, s.metric), c);
}

double log_slope(const StepFunction& f, double lo, double hi) {
  std::vector<double> xs, ys;
  for (double l : geometric_grid(lo, hi, 40)) {
    xs.push_back(std::log(l));
    ys.push_back(std::log(f(l)));
  }
  return fit_line(xs, ys).slope;
}

}  // namespace

TEST_CASE("power potentials") {
  auto c = build_interval_lattice(12);
  auto g = refine(c, 3);
  auto f = eval(power(1.0, 2.0, MetricKind::euclidean_coordinate), g);
  CHECK(f.vertex_values[g.origin_vertex] == 0.0);
  for (std::size_t v = 0; v < g.vertex_count(); ++v) {
    const auto& x = g.vertices[v].coord.x;
    if (x.den() == 1) CHECK(f.vertex_values[v] == doctest::Approx(std::pow(x.to_double(), 2)));
  }
  for (std::size_t k = 0; k < g.cells.size(); ++k)
    for (double v : f.cell_values[k]) {
      CHECK(f.cell_inf[k] <= v);
      CHECK(v <= f.cell_sup[k]);
    }
  PotentialSpec bad = power(-1.0, 2.0, MetricKind::euclidean_coordinate);
  CHECK_THROWS(bad.validate());
}

TEST_CASE("distribution functions") {
  auto hex = build_hexagonal(build_sg2_template(), 4);
  auto g = refine(hex, 2);
  auto f = eval(power(1.0, 2.0, MetricKind::cell_graph_scaled), g);
  auto exact = distribution(f, g, DistributionKind::exact);
  auto sup = distribution(f, g, DistributionKind::sup_envelope);
  auto inf = distribution(f, g, DistributionKind::inf_envelope);
  for (const auto* s : {&exact, &sup, &inf}) CHECK(s->nondecreasing());
  for (double l = 0; l < 2 * f.max_value(); l += 0.25) {
    CHECK(sup(l) <= exact(l) + 1e-9);
    CHECK(exact(l) <= inf(l) + 1e-9);
  }
  CHECK(exact(f.max_value()) == doctest::Approx(hex.total_measure()));
  CHECK(sup(f.max_value()) == doctest::Approx(hex.total_measure()));
}

TEST_CASE("distribution of x² on a half-line grows like λ^{1/2}") {
  auto g = refine(build_interval_lattice(40), 4);
  auto f = eval(power(1.0, 2.0, MetricKind::euclidean_coordinate), g);
  auto exact = distribution(f, g, DistributionKind::exact);
  CHECK(log_slope(exact, 4.0, 400.0) == doctest::Approx(0.5).epsilon(0.05));
}

TEST_CASE("distribution exponent follows mass dimension over β") {
  auto hex = build_hexagonal(build_sg2_template(), 24);
  auto g = refine(hex, 1);
  const int r_max = 12;
  double d_h = estimate_mass_dimension(hex, hex.origin_cell, 3, r_max);
  for (double beta : {1.0, 2.0}) {
    auto f = eval(power(1.0, beta, MetricKind::cell_graph_scaled), g);
    auto exact = distribution(f, g, DistributionKind::exact);
    double top = std::pow(r_max * g.template_diameter, beta);
    CHECK(log_slope(exact, top / std::pow(4.0, beta), top) == doctest::Approx(d_h / beta).epsilon(0.1));
  }
}

TEST_CASE("doubling") {
  auto g = refine(build_hexagonal(build_sg2_template(), 10), 1);
  auto zero = PotentialField::zero(g);
  auto z = check_doubling(distribution(zero, g, DistributionKind::sup_envelope),
                          distribution(zero, g, DistributionKind::inf_envelope), geometric_grid(1, 100, 10));
  CHECK(z.c_hat == doctest::Approx(1.0));
  CHECK(z.pass);

  auto f = eval(power(1.0, 2.0, MetricKind::cell_graph_scaled), g);
  auto grid = geometric_grid(reliable_lambda_max(f, g) / 30, reliable_lambda_max(f, g) / 2, 20);
  auto r = check_doubling(distribution(f, g, DistributionKind::sup_envelope),
                          distribution(f, g, DistributionKind::inf_envelope), grid);
  CHECK(r.stable);
  CHECK(r.c_hat >= 2.0);
  CHECK(r.c_hat < 16.0);
}

TEST_CASE("doubling with exponentially growing cell potential on the ladder") {
  auto g = refine(build_ladder(build_sg2_template(), 60), 1);
  auto hop = origin_hops(g);
  std::vector<double> per_cell;
  for (int h : hop) per_cell.push_back(std::exp(static_cast<double>(h)));
  auto f = PotentialField::from_cell_constants(g, per_cell);
  auto r = check_doubling(distribution(f, g, DistributionKind::sup_envelope),
                          distribution(f, g, DistributionKind::inf_envelope), geometric_grid(std::exp(2), std::exp(25), 30));
  CHECK(r.stable);
  CHECK(std::isfinite(r.c_hat));
}

TEST_CASE("envelope ratio") {
  auto blow = build_blowup(build_sg2_template(), {1, 2, 3, 1, 2, 3, 1}, 6);
  auto g = refine(blow, 2);
  auto f = eval(power(1.0, 2.0, MetricKind::cell_graph_scaled), g);
  double top = reliable_lambda_max(f, g);
  auto r = check_envelope_ratio(distribution(f, g, DistributionKind::sup_envelope),
                                distribution(f, g, DistributionKind::inf_envelope), geometric_grid(top / 100, top, 30));
  CHECK(r.decreasing);
  CHECK(r.top_decade_slope < 0);

  PotentialSpec cp;
  cp.kind = PotentialKind::cell_power;
  cp.beta = 2.0;
  auto fc = eval(cp, g);
  for (std::size_t k = 0; k < g.cells.size(); ++k) CHECK(fc.cell_sup[k] == fc.cell_inf[k]);
  auto rc = check_envelope_ratio(distribution(fc, g, DistributionKind::sup_envelope),
                                 distribution(fc, g, DistributionKind::inf_envelope), geometric_grid(1, 100, 20));
  for (double h : rc.h) CHECK(h == 0.0);
  CHECK(rc.pass);
  CHECK_THROWS(check_envelope_ratio(distribution(fc, g, DistributionKind::sup_envelope),
                                    distribution(fc, g, DistributionKind::inf_envelope), {1e-9}));
}

TEST_CASE("growth and Hölder constants") {
  auto g = refine(build_interval_lattice(20), 3);
  auto dist = distance_field(g, MetricKind::euclidean_coordinate);
  auto f = evaluate(power(3.0, 2.0, MetricKind::euclidean_coordinate), g, dist);
  auto r = check_growth_and_hoelder(f, g, dist, 2.0, 1.0);
  CHECK(r.c3 == doctest::Approx(3.0));
  CHECK(r.c4 == doctest::Approx(3.0));
  CHECK(r.c5_available);
  for (std::size_t k = 0; k < g.cells.size(); ++k) {
    double far = r.cell_distance[k];
    CHECK(r.cell_gap[k] == doctest::Approx(3.0 * (far * far - (far - 1) * (far - 1))));
  }

  auto hg = refine(build_hexagonal(build_sg2_template(), 6), 2);
  auto hd = distance_field(hg, MetricKind::euclidean_coordinate);
  auto hf = evaluate(power(1.0, 2.0, MetricKind::euclidean_coordinate), hg, hd);
  auto hr = check_growth_and_hoelder(hf, hg, hd, 2.0, 1.0);
  CHECK(std::isfinite(hr.c8));
  CHECK(hr.c8 > 0);
  CHECK(hr.c8 < 10);
}

TEST_CASE("graph harmonic potential solves ΔV = 1") {
  auto blow = build_blowup(build_sg2_template(), {1, 2, 3, 1, 2, 3, 1, 2, 3}, 4);
  auto g = refine(blow, 2);
  for (int padding : {0, 2}) {
    PotentialSpec s;
    s.kind = PotentialKind::graph_harmonic;
    s.metric = MetricKind::cell_graph_scaled;
    s.harmonic_padding = padding;
    auto f = eval(s, g, &blow);
    CHECK(f.harmonic_residual < 1e-8);
    CHECK(f.min_value() == doctest::Approx(0.0));
    // Independent plug-back through an explicitly assembled Laplacian.
    Eigen::VectorXd lv = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(g.vertex_count()));
    for (const auto& e : g.edges) {
      double flow = e.conductance * (f.vertex_values[e.u] - f.vertex_values[e.v]);
      lv[e.u] -= flow;
      lv[e.v] += flow;
    }
    for (std::size_t v = 0; v < g.vertex_count(); ++v)
      if (g.vertices[v].tag != VertexTag::truncation_boundary)
        CHECK(lv[v] / g.vertex_measure[v] == doctest::Approx(1.0).epsilon(1e-8));
  }
  PotentialSpec s;
  s.kind = PotentialKind::graph_harmonic;
  CHECK_THROWS(eval(s, refine(build_ladder(build_sg2_template(), 3), 1), nullptr));
}
