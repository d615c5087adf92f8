#include "fracspec/trace.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <boost/math/special_functions/gamma.hpp>

#include "fracspec/fit.hpp"
#include "fracspec/parallel.hpp"

namespace fracspec {

CellTrace cell_trace(const StepFunction& counting, double t, double d_s) {
  if (!(t > 0)) throw std::invalid_argument("trace needs t > 0");
  const double cap = counting.domain_max();
  CellTrace r;
  if (std::isfinite(cap) && t * cap < kMinCapTimesT)
    throw std::domain_error("spectral cap too low for this t: tail not negligible");
  const auto& bp = counting.breakpoints();
  double c = 0;
  const double a = d_s / 2;
  if (counting.base() > 0) r.value += counting.base();
  for (std::size_t i = 0; i < bp.size(); ++i) {
    r.value += counting.jump(i) * std::exp(-bp[i] * t);
    if (bp[i] > 0) c = std::max(c, counting.values()[i] * std::pow(bp[i], -a));
  }
  if (std::isfinite(cap)) r.tail_bound = c * std::pow(t, -a) * boost::math::tgamma(a + 1, t * cap);
  return r;
}

CellTrace cell_trace(const Spectrum& spectrum, double t) {
  if (!(t > 0)) throw std::invalid_argument("trace needs t > 0");
  CellTrace r;
  for (double l : spectrum.eigenvalues) r.value += std::exp(-l * t);
  return r;
}

TraceTable bracketed_trace(const GraphApprox& graph, const PotentialField& field, const CellSpectra& cells,
                           const std::vector<double>& t_grid) {
  const std::size_t n = t_grid.size();
  TraceTable tb;
  tb.t = t_grid;
  for (auto* v : {&tb.l_lower, &tb.l_upper, &tb.f_t, &tb.f_lower, &tb.f_upper, &tb.cell_dirichlet, &tb.cell_neumann,
                  &tb.tail_bound, &tb.rim_share})
    v->assign(n, 0.0);
  std::vector<bool> rim_cell(graph.cells.size(), false);
  for (std::size_t k = 0; k < graph.cells.size(); ++k)
    for (std::size_t id : graph.cells[k].ids)
      if (graph.vertices[id].tag == VertexTag::truncation_boundary) rim_cell[k] = true;
  parallel_for(n, [&](std::size_t i) {
    const double t = t_grid[i];
    CellTrace d = cell_trace(cells.dirichlet, t, cells.d_s);
    CellTrace nn = cell_trace(cells.neumann, t, cells.d_s);
    double ft = 0, fl = 0, fu = 0, rim = 0;
    for (std::size_t k = 0; k < graph.cells.size(); ++k) {
      const auto& cv = graph.cells[k];
      for (std::size_t j = 0; j < cv.ids.size(); ++j) ft += cv.weights[j] * std::exp(-t * field.cell_values[k][j]);
      fl += std::exp(-t * field.cell_sup[k]);
      double e = std::exp(-t * field.cell_inf[k]);
      fu += e;
      if (rim_cell[k]) rim += e;
    }
    tb.cell_dirichlet[i] = d.value;
    tb.cell_neumann[i] = nn.value;
    tb.tail_bound[i] = nn.tail_bound * fu;
    tb.l_lower[i] = d.value * fl;
    tb.l_upper[i] = (nn.value + nn.tail_bound) * fu;
    tb.f_t[i] = ft;
    tb.f_lower[i] = fl;
    tb.f_upper[i] = fu;
    tb.rim_share[i] = fu > 0 ? rim / fu : 0;
  });
  return tb;
}

FactorizationTable factorization_ratio(const TraceTable& tb) {
  FactorizationTable f;
  f.t = tb.t;
  for (std::size_t i = 0; i < tb.t.size(); ++i) {
    double denom = 0.5 * (tb.cell_dirichlet[i] + tb.cell_neumann[i]) * tb.f_t[i];
    f.lower.push_back(tb.l_lower[i] / denom);
    f.upper.push_back(tb.l_upper[i] / denom);
    f.ratio.push_back(0.5 * (tb.l_lower[i] + tb.l_upper[i]) / denom);
  }
  return f;
}

TraceWindow reliable_window(const TraceTable& tb, double cap, double rim_tolerance) {
  if (tb.t.empty()) throw std::invalid_argument("empty trace table");
  TraceWindow w;
  w.t_min_cap = std::isfinite(cap) ? kMinCapTimesT / cap : 0.0;
  // Rim share decreases with t; take the smallest t from which it stays small.
  w.t_min_rim = std::numeric_limits<double>::infinity();
  for (std::size_t i = tb.t.size(); i-- > 0;) {
    if (tb.rim_share[i] > rim_tolerance) break;
    w.t_min_rim = tb.t[i];
  }
  w.t_min = std::max(w.t_min_cap, w.t_min_rim);
  w.t_max = tb.t.back();
  return w;
}

double fit_spectral_dimension_t(const TraceTable& tb) {
  std::vector<double> x, y;
  for (std::size_t i = 0; i < tb.t.size(); ++i) {
    x.push_back(std::log(tb.t[i]));
    y.push_back(std::log(0.5 * (tb.l_lower[i] + tb.l_upper[i])));
  }
  if (x.size() < 2 || std::abs(x.back() - x.front()) < std::log(10.0) * (1 - 1e-9))
    throw std::invalid_argument("trace fit needs a decade of t");
  return -2 * fit_line(x, y).slope;
}

}  // namespace fracspec
