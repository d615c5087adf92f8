#include "fracspec/bohr.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "fracspec/fit.hpp"
#include "fracspec/parallel.hpp"

namespace fracspec {

namespace {

std::int64_t as_count(double v) { return static_cast<std::int64_t>(std::llround(v)); }

}  // namespace

CountingProblem::CountingProblem(const GraphApprox& graph, const PotentialField& field, CellSpectra cells,
                                 bool with_direct)
    : graph_(graph), field_(field), cells_(std::move(cells)) {
  if (field.cell_sup.size() != graph.cells.size()) throw std::invalid_argument("potential does not match the graph");
  rim_min_ = std::numeric_limits<double>::infinity();
  for (std::size_t v = 0; v < graph.vertex_count(); ++v)
    if (graph.vertices[v].tag == VertexTag::truncation_boundary) rim_min_ = std::min(rim_min_, field.vertex_values[v]);
  if (with_direct) {
    dirichlet_rim_ = assemble(graph, CellCoupling::glued, BoundaryCondition::dirichlet, &field);
    neumann_rim_ = assemble(graph, CellCoupling::glued, BoundaryCondition::neumann, &field);
  }
}

BracketedCount CountingProblem::count(double lambda) const {
  BracketedCount c;
  c.lambda = lambda;
  double lower = 0, upper = 0;
  for (std::size_t k = 0; k < graph_.cells.size(); ++k) {
    if (field_.cell_sup[k] <= lambda) lower += cells_.dirichlet(lambda - field_.cell_sup[k]);
    if (field_.cell_inf[k] <= lambda) upper += cells_.neumann(lambda - field_.cell_inf[k]);
  }
  c.lower = as_count(lower);
  c.upper = as_count(upper);
  c.rim_certified = rim_min_ >= 2 * lambda;
  if (dirichlet_rim_) {
    c.direct = static_cast<std::int64_t>(count_below(*dirichlet_rim_, lambda).count);
    c.direct_neumann = static_cast<std::int64_t>(count_below(*neumann_rim_, lambda).count);
  }
  return c;
}

std::vector<BracketedCount> CountingProblem::count_grid(const std::vector<double>& grid) const {
  std::vector<BracketedCount> out(grid.size());
  parallel_for(grid.size(), [&](std::size_t i) { out[i] = count(grid[i]); });
  return out;
}

BracketedCount bracketed_count(const CellComplex& complex, int m, const PotentialSpec& potential, double lambda) {
  const GraphApprox graph = refine(complex, m);
  const DistanceField dist = distance_field(graph, potential.metric);
  const PotentialField field = evaluate(potential, graph, dist, &complex);
  return CountingProblem(graph, field, level_cell_spectra(complex.tmpl, m), true).count(lambda);
}

BohrFunction bohr_g(const PotentialField& field, const GraphApprox& graph, const WeylFunction& weyl,
                    const CellSpectra& cells, const std::vector<double>& grid) {
  BohrFunction b;
  b.lambda = grid;
  const std::size_t n = grid.size();
  b.g.assign(n, 0);
  b.g_sup.assign(n, 0);
  b.g_inf.assign(n, 0);
  b.r_sup.assign(n, 0);
  b.r_inf.assign(n, 0);
  parallel_for(n, [&](std::size_t i) {
    const double lam = grid[i];
    double g = 0, gs = 0, gi = 0, rs = 0, ri = 0;
    for (std::size_t k = 0; k < graph.cells.size(); ++k) {
      const auto& cv = graph.cells[k];
      for (std::size_t j = 0; j < cv.ids.size(); ++j) {
        double v = field.cell_values[k][j];
        if (v < lam) g += cv.weights[j] * weyl(lam - v);
      }
      if (field.cell_sup[k] <= lam) {
        double x = lam - field.cell_sup[k];
        double w = weyl(x);
        gs += w;
        rs += cells.dirichlet(x) - w;
      }
      if (field.cell_inf[k] <= lam) {
        double x = lam - field.cell_inf[k];
        double w = weyl(x);
        gi += w;
        ri += cells.neumann(x) - w;
      }
    }
    b.g[i] = g;
    b.g_sup[i] = gs;
    b.g_inf[i] = gi;
    b.r_sup[i] = rs;
    b.r_inf[i] = ri;
  });
  return b;
}

double bohr_g_layercake(const StepFunction& distribution, const WeylFunction& weyl, double lambda) {
  const auto& bp = distribution.breakpoints();
  std::vector<double> levels{0.0};
  for (std::size_t i = 0; i < bp.size() && bp[i] < lambda; ++i) levels.push_back(weyl(lambda - bp[i]));
  std::sort(levels.begin(), levels.end());
  levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
  double sum = 0;
  for (std::size_t i = 0; i + 1 < levels.size(); ++i) {
    double t = 0.5 * (levels[i] + levels[i + 1]);
    double x = weyl.inverse(t);
    sum += distribution(lambda - x) * (levels[i + 1] - levels[i]);
  }
  return sum;
}

double bohr_error_bound_at(const BohrFunction& b, std::size_t i) {
  if (!(b.g_sup[i] > 0) || !(b.g_inf[i] > 0))
    throw std::domain_error("error bound undefined below the bottom of the spectrum");
  double via_sup = std::abs(b.g_inf[i] / b.g_sup[i] - 1 + b.r_inf[i] / b.g_sup[i]);
  double via_inf = std::abs(b.g_sup[i] / b.g_inf[i] - 1 + b.r_sup[i] / b.g_inf[i]);
  return std::max(via_sup, via_inf);
}

std::vector<double> bohr_error_bound(const BohrFunction& b) {
  std::vector<double> out(b.lambda.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = bohr_error_bound_at(b, i);
  return out;
}

std::vector<double> period_average(const std::vector<double>& lambda, const std::vector<double>& values,
                                   double ratio) {
  if (!(ratio > 1)) throw std::invalid_argument("period ratio must exceed 1");
  const double nan = std::numeric_limits<double>::quiet_NaN();
  std::vector<double> out(lambda.size(), nan);
  for (std::size_t i = 0; i < lambda.size(); ++i) {
    const double from = lambda[i] / ratio;
    if (lambda.front() > from * (1 + 1e-12)) continue;
    double sum = 0;
    std::size_t n = 0;
    for (std::size_t j = 0; j <= i; ++j)
      if (lambda[j] > from * (1 + 1e-12)) {
        sum += values[j];
        ++n;
      }
    out[i] = sum / static_cast<double>(n);
  }
  return out;
}

bool nonincreasing_over_top_decade(const std::vector<double>& lambda, const std::vector<double>& values,
                                   double slack) {
  const double top = lambda.back() / 10 * (1 - 1e-12);
  double prev = std::numeric_limits<double>::infinity();
  std::size_t seen = 0;
  for (std::size_t i = 0; i < lambda.size(); ++i) {
    if (lambda[i] < top || !std::isfinite(values[i])) continue;
    if (values[i] > prev + slack) return false;
    prev = values[i];
    ++seen;
  }
  return seen >= 2;
}

double default_lambda_star(double lambda) { return lambda * (1 + 1 / std::sqrt(lambda)); }

WeakBohrReport weak_bohr_check(const StepFunction& f_sup, const StepFunction& f_inf, const std::vector<double>& grid,
                               const LambdaStarRule& rule) {
  WeakBohrReport r;
  std::vector<double> x, y;
  double worst_all = 0;
  for (double lam : grid) {
    double star = rule(lam);
    if (!(star >= lam)) throw std::invalid_argument("λ* must not be below λ");
    double a = f_sup(star), b = f_inf(star);
    if (a <= 0 || b <= 0) continue;
    r.lambda.push_back(lam);
    r.lambda_star.push_back(star);
    r.inf_over_sup.push_back(f_inf(lam) / a);
    r.sup_over_inf.push_back(f_sup(lam) / b);
    double dev = std::max(std::abs(r.inf_over_sup.back() - 1), std::abs(r.sup_over_inf.back() - 1));
    worst_all = std::max(worst_all, dev);
    if (lam >= grid.back() / 10 && dev > 0) {
      x.push_back(std::log(lam));
      y.push_back(std::log(dev));
    }
  }
  if (worst_all == 0) {
    r.pass = !r.lambda.empty();
    return r;
  }
  if (x.size() >= 2) {
    r.top_decade_slope = fit_line(x, y).slope;
    r.pass = r.top_decade_slope < 0;
  }
  return r;
}

double fit_dimension(const std::vector<double>& lambda, const std::vector<double>& counts) {
  std::vector<double> x, y;
  for (std::size_t i = 0; i < lambda.size(); ++i)
    if (counts[i] > 0 && lambda[i] > 0) {
      x.push_back(std::log(lambda[i]));
      y.push_back(std::log(counts[i]));
    }
  if (x.size() < 2 || x.back() - x.front() < std::log(10.0) * (1 - 1e-9))
    throw std::invalid_argument("dimension fit needs a decade of positive counts");
  return 2 * fit_line(x, y).slope;
}

DimensionFit fit_spectral_dimension(const std::vector<BracketedCount>& counts) {
  std::vector<double> lam, mid, lo, hi, lam_lo;
  for (const auto& c : counts) {
    if (c.upper <= 0) continue;
    lam.push_back(c.lambda);
    mid.push_back(0.5 * static_cast<double>(c.lower + c.upper));
    hi.push_back(static_cast<double>(c.upper));
  }
  DimensionFit f;
  f.d_s = fit_dimension(lam, mid);
  f.d_s_upper = fit_dimension(lam, hi);
  for (const auto& c : counts)
    if (c.lower > 0) {
      lam_lo.push_back(c.lambda);
      lo.push_back(static_cast<double>(c.lower));
    }
  f.d_s_lower = lam_lo.size() >= 2 && std::log(lam_lo.back() / lam_lo.front()) >= std::log(10.0) * (1 - 1e-9)
                    ? fit_dimension(lam_lo, lo)
                    : f.d_s_upper;
  f.confidence = 0.5 * std::abs(f.d_s_upper - f.d_s_lower);
  std::vector<double> x, y;
  for (std::size_t i = 0; i < lam.size(); ++i) {
    x.push_back(std::log(lam[i]));
    y.push_back(std::log(mid[i]));
  }
  f.residual_rms = fit_line(x, y).residual_rms;
  return f;
}

}  // namespace fracspec
