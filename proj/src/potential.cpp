#include "fracspec/potential.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <stdexcept>
#include <unordered_map>

#include <Eigen/SparseCholesky>

#include "fracspec/fit.hpp"

namespace fracspec {

std::string to_string(PotentialKind kind) {
  switch (kind) {
    case PotentialKind::power_distance: return "power_distance";
    case PotentialKind::cell_power: return "cell_power";
    case PotentialKind::graph_harmonic: return "graph_harmonic";
    case PotentialKind::table: return "table";
    case PotentialKind::zero: return "zero";
  }
  return "?";
}

PotentialKind potential_kind_from_string(const std::string& name) {
  if (name == "power_distance") return PotentialKind::power_distance;
  if (name == "cell_power") return PotentialKind::cell_power;
  if (name == "graph_harmonic") return PotentialKind::graph_harmonic;
  if (name == "table") return PotentialKind::table;
  if (name == "zero") return PotentialKind::zero;
  throw std::invalid_argument("unknown potential kind '" + name + "'");
}

void PotentialSpec::validate() const {
  if (kind == PotentialKind::power_distance || kind == PotentialKind::cell_power) {
    if (!(c > 0) || !(beta > 0)) throw std::invalid_argument("power potential needs c > 0 and beta > 0");
  }
  if (kind == PotentialKind::graph_harmonic && harmonic_padding < 0)
    throw std::invalid_argument("graph_harmonic padding must be nonnegative");
  if (kind == PotentialKind::table)
    for (double v : table)
      if (!(v >= 0)) throw std::invalid_argument("tabulated potential must be nonnegative");
}

namespace {

void fill_envelopes(PotentialField& f) {
  const std::size_t n = f.cell_values.size();
  f.cell_sup.assign(n, 0.0);
  f.cell_inf.assign(n, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    const auto& vs = f.cell_values[k];
    if (vs.empty()) continue;
    auto [lo, hi] = std::minmax_element(vs.begin(), vs.end());
    f.cell_inf[k] = *lo;
    f.cell_sup[k] = *hi;
  }
}

}  // namespace

std::vector<int> origin_hops(const GraphApprox& g) {
  std::vector<int> hop(g.cells.size(), -1);
  std::deque<std::size_t> queue;
  for (std::size_t c : g.vertices[g.origin_vertex].cells) {
    hop[c] = 0;
    queue.push_back(c);
  }
  while (!queue.empty()) {
    std::size_t a = queue.front();
    queue.pop_front();
    for (std::size_t b : g.cell_graph[a])
      if (hop[b] < 0) {
        hop[b] = hop[a] + 1;
        queue.push_back(b);
      }
  }
  return hop;
}

namespace {

Eigen::SparseMatrix<double> laplacian(const GraphApprox& g) {
  std::vector<Eigen::Triplet<double>> t;
  t.reserve(4 * g.edges.size());
  for (const GraphEdge& e : g.edges) {
    auto u = static_cast<int>(e.u), v = static_cast<int>(e.v);
    t.emplace_back(u, u, e.conductance);
    t.emplace_back(v, v, e.conductance);
    t.emplace_back(u, v, -e.conductance);
    t.emplace_back(v, u, -e.conductance);
  }
  auto n = static_cast<Eigen::Index>(g.vertex_count());
  Eigen::SparseMatrix<double> L(n, n);
  L.setFromTriplets(t.begin(), t.end());
  return L;
}

// Solves E V = −M·1 with V = 0 on the rim of a padded blow-up and reads V back on `graph`.
std::vector<double> harmonic_values(const PotentialSpec& spec, const GraphApprox& graph, const CellComplex& complex,
                                    double* residual) {
  if (complex.builder != "blowup") throw std::invalid_argument("graph_harmonic needs a blow-up complex");
  const int g_pad = complex.generations + spec.harmonic_padding;
  if (static_cast<int>(complex.word.size()) < g_pad)
    throw std::invalid_argument("blow-up word too short for harmonic padding");
  CellComplex padded = build_blowup(complex.tmpl, complex.word, g_pad);
  GraphApprox pg = refine(padded, graph.level);

  std::vector<long> slot(pg.vertex_count(), -1);
  long free = 0;
  for (std::size_t v = 0; v < pg.vertex_count(); ++v)
    if (pg.vertices[v].tag != VertexTag::truncation_boundary) slot[v] = free++;
  if (free == 0) throw std::runtime_error("unsolvable harmonic system: no free vertices");
  std::vector<Eigen::Triplet<double>> t;
  for (const GraphEdge& e : pg.edges) {
    long a = slot[e.u], b = slot[e.v];
    if (a >= 0) t.emplace_back(a, a, e.conductance);
    if (b >= 0) t.emplace_back(b, b, e.conductance);
    if (a >= 0 && b >= 0) {
      t.emplace_back(a, b, -e.conductance);
      t.emplace_back(b, a, -e.conductance);
    }
  }
  Eigen::SparseMatrix<double> E(free, free);
  E.setFromTriplets(t.begin(), t.end());
  Eigen::VectorXd rhs(free);
  for (std::size_t v = 0; v < pg.vertex_count(); ++v)
    if (slot[v] >= 0) rhs[slot[v]] = -pg.vertex_measure[v];
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver(E);
  if (solver.info() != Eigen::Success) throw std::runtime_error("unsolvable harmonic system");
  Eigen::VectorXd sol = solver.solve(rhs);
  if (solver.info() != Eigen::Success) throw std::runtime_error("unsolvable harmonic system");

  std::unordered_map<Point, std::size_t, PointHash> index;
  for (std::size_t v = 0; v < pg.vertex_count(); ++v) index.emplace(pg.vertices[v].coord, v);
  std::vector<double> values(graph.vertex_count());
  for (std::size_t v = 0; v < graph.vertex_count(); ++v) {
    auto it = index.find(graph.vertices[v].coord);
    if (it == index.end()) throw std::logic_error("inner vertex missing from padded truncation");
    long s = slot[it->second];
    values[v] = s >= 0 ? sol[s] : 0.0;
  }
  double lo = *std::min_element(values.begin(), values.end());
  for (double& v : values) v -= lo;

  // Plug-back residual of ΔV = 1 on vertices whose whole neighbourhood is present.
  Eigen::SparseMatrix<double> L = laplacian(graph);
  Eigen::VectorXd vv = Eigen::Map<const Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size()));
  Eigen::VectorXd lv = L * vv;
  double worst = 0;
  for (std::size_t v = 0; v < graph.vertex_count(); ++v) {
    if (graph.vertices[v].tag == VertexTag::truncation_boundary) continue;
    worst = std::max(worst, std::abs(-lv[static_cast<Eigen::Index>(v)] / graph.vertex_measure[v] - 1.0));
  }
  *residual = worst;
  return values;
}

}  // namespace

PotentialField PotentialField::zero(const GraphApprox& graph) {
  return from_vertex_values(graph, std::vector<double>(graph.vertex_count(), 0.0));
}

PotentialField PotentialField::from_vertex_values(const GraphApprox& graph, std::vector<double> values) {
  if (values.size() != graph.vertex_count()) throw std::invalid_argument("potential size differs from vertex count");
  PotentialField f;
  f.cell_values.resize(graph.cells.size());
  for (std::size_t k = 0; k < graph.cells.size(); ++k) {
    const auto& ids = graph.cells[k].ids;
    f.cell_values[k].resize(ids.size());
    for (std::size_t i = 0; i < ids.size(); ++i) f.cell_values[k][i] = values[ids[i]];
  }
  f.vertex_values = std::move(values);
  fill_envelopes(f);
  return f;
}

PotentialField PotentialField::from_cell_constants(const GraphApprox& graph, const std::vector<double>& per_cell) {
  if (per_cell.size() != graph.cells.size()) throw std::invalid_argument("one value per cell required");
  PotentialField f;
  f.cell_values.resize(graph.cells.size());
  std::vector<double> weighted(graph.vertex_count(), 0.0);
  for (std::size_t k = 0; k < graph.cells.size(); ++k) {
    const auto& cv = graph.cells[k];
    f.cell_values[k].assign(cv.ids.size(), per_cell[k]);
    for (std::size_t i = 0; i < cv.ids.size(); ++i) weighted[cv.ids[i]] += cv.weights[i] * per_cell[k];
  }
  f.vertex_values.resize(graph.vertex_count());
  for (std::size_t v = 0; v < graph.vertex_count(); ++v) f.vertex_values[v] = weighted[v] / graph.vertex_measure[v];
  fill_envelopes(f);
  return f;
}

double PotentialField::min_value() const {
  return cell_inf.empty() ? 0.0 : *std::min_element(cell_inf.begin(), cell_inf.end());
}

double PotentialField::max_value() const {
  return cell_sup.empty() ? 0.0 : *std::max_element(cell_sup.begin(), cell_sup.end());
}

PotentialField evaluate(const PotentialSpec& spec, const GraphApprox& graph, const DistanceField& distances,
                        const CellComplex* complex) {
  spec.validate();
  switch (spec.kind) {
    case PotentialKind::power_distance: {
      if (distances.values.size() != graph.vertex_count())
        throw std::invalid_argument("distance field does not cover the graph");
      std::vector<double> v(graph.vertex_count());
      for (std::size_t i = 0; i < v.size(); ++i) v[i] = spec.c * std::pow(distances.values[i], spec.beta);
      return PotentialField::from_vertex_values(graph, std::move(v));
    }
    case PotentialKind::cell_power: {
      auto hop = origin_hops(graph);
      std::vector<double> per_cell(graph.cells.size());
      for (std::size_t k = 0; k < per_cell.size(); ++k)
        per_cell[k] = spec.c * std::pow(hop[k] * graph.template_diameter, spec.beta);
      return PotentialField::from_cell_constants(graph, per_cell);
    }
    case PotentialKind::graph_harmonic: {
      if (!complex) throw std::invalid_argument("graph_harmonic needs the source complex");
      double residual = 0;
      auto values = harmonic_values(spec, graph, *complex, &residual);
      auto f = PotentialField::from_vertex_values(graph, std::move(values));
      f.harmonic_residual = residual;
      return f;
    }
    case PotentialKind::table:
      return PotentialField::from_vertex_values(graph, spec.table);
    case PotentialKind::zero:
      return PotentialField::zero(graph);
  }
  throw std::logic_error("unhandled potential kind");
}

StepFunction distribution(const PotentialField& field, const GraphApprox& graph, DistributionKind which) {
  std::vector<std::pair<double, double>> jumps;
  switch (which) {
    case DistributionKind::exact:
      for (std::size_t k = 0; k < graph.cells.size(); ++k)
        for (std::size_t i = 0; i < graph.cells[k].ids.size(); ++i)
          jumps.emplace_back(field.cell_values[k][i], graph.cells[k].weights[i]);
      break;
    case DistributionKind::sup_envelope:
      for (double v : field.cell_sup) jumps.emplace_back(v, 1.0);
      break;
    case DistributionKind::inf_envelope:
      for (double v : field.cell_inf) jumps.emplace_back(v, 1.0);
      break;
  }
  return StepFunction::from_jumps(std::move(jumps));
}

double reliable_lambda_max(const PotentialField& field, const GraphApprox& graph) {
  auto hop = origin_hops(graph);
  int radius = *std::max_element(hop.begin(), hop.end());
  double lim = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < hop.size(); ++k)
    if (2 * hop[k] > radius) lim = std::min(lim, field.cell_inf[k]);
  return lim;
}

DoublingReport check_doubling(const StepFunction& f_sup, const StepFunction& f_inf, const std::vector<double>& grid) {
  std::vector<double> lam, ratio;
  for (double l : grid) {
    double denom = f_sup(l);
    if (denom <= 0) continue;
    lam.push_back(l);
    ratio.push_back(f_inf(2 * l) / denom);
  }
  if (lam.size() < 4) throw std::invalid_argument("doubling window empty");
  DoublingReport r;
  r.points_used = lam.size();
  const double split = 0.5 * (std::log(lam.front()) + std::log(lam.back()));
  for (std::size_t i = 0; i < lam.size(); ++i) {
    r.c_hat = std::max(r.c_hat, ratio[i]);
    double& half = std::log(lam[i]) <= split ? r.c_lower_half : r.c_upper_half;
    half = std::max(half, ratio[i]);
  }
  r.stable = r.c_lower_half > 0 && r.c_upper_half > 0 &&
             std::max(r.c_lower_half, r.c_upper_half) <= 2.0 * std::min(r.c_lower_half, r.c_upper_half);
  r.pass = std::isfinite(r.c_hat) && r.stable;
  return r;
}

EnvelopeReport check_envelope_ratio(const StepFunction& f_sup, const StepFunction& f_inf,
                                    const std::vector<double>& grid) {
  EnvelopeReport r;
  for (double l : grid) {
    double denom = f_sup(l);
    if (denom <= 0) continue;
    r.lambda.push_back(l);
    r.h.push_back(f_inf(l) / denom - 1.0);
  }
  if (r.lambda.size() < 4) throw std::invalid_argument("envelope window empty");
  r.h_max = *std::max_element(r.h.begin(), r.h.end());
  const double top = r.lambda.back() / 10.0;
  std::vector<double> xs, ys;
  bool all_zero = true;
  for (std::size_t i = 0; i < r.lambda.size(); ++i) {
    if (r.lambda[i] < top) continue;
    if (r.h[i] != 0.0) all_zero = false;
    if (r.h[i] > 0) {
      xs.push_back(std::log(r.lambda[i]));
      ys.push_back(std::log(r.h[i]));
    }
  }
  if (all_zero) {
    r.decreasing = true;
  } else if (xs.size() >= 2) {
    r.top_decade_slope = fit_line(xs, ys).slope;
    r.decreasing = r.top_decade_slope < 0;
  }
  r.pass = r.decreasing;
  return r;
}

GrowthReport check_growth_and_hoelder(const PotentialField& field, const GraphApprox& graph,
                                      const DistanceField& distances, double beta, double gamma) {
  GrowthReport r;
  const auto& d = distances.values;
  r.c3 = std::numeric_limits<double>::infinity();
  r.c4 = 0;
  for (std::size_t v = 0; v < graph.vertex_count(); ++v) {
    if (d[v] < 1.0) continue;
    double q = field.vertex_values[v] / std::pow(d[v], beta);
    r.c3 = std::min(r.c3, q);
    r.c4 = std::max(r.c4, q);
  }
  if (!std::isfinite(r.c3)) r.c3 = 0;

  // Hölder quotient over pairs inside each cell (a deterministic subsample for large cells).
  r.c5_available = pair_distance(graph, distances.kind, 0, graph.vertex_count() > 1 ? 1 : 0) >= 0 ||
                   graph.vertex_count() == 1;
  const double diam = graph.template_diameter;
  r.cell_gap.resize(graph.cells.size());
  r.cell_distance.resize(graph.cells.size());
  for (std::size_t k = 0; k < graph.cells.size(); ++k) {
    const auto& ids = graph.cells[k].ids;
    const auto& vals = field.cell_values[k];
    double dmax = 0;
    for (std::size_t id : ids) dmax = std::max(dmax, d[id]);
    r.cell_gap[k] = field.cell_sup[k] - field.cell_inf[k];
    r.cell_distance[k] = dmax;
    if (dmax > 0) r.c8 = std::max(r.c8, r.cell_gap[k] / (std::pow(diam, gamma) * std::pow(dmax, beta - gamma)));
    if (!r.c5_available) continue;
    const std::size_t stride = std::max<std::size_t>(1, ids.size() / 16);
    for (std::size_t i = 0; i < ids.size(); i += stride)
      for (std::size_t j = i + 1; j < ids.size(); j += stride) {
        double dxy = pair_distance(graph, distances.kind, ids[i], ids[j]);
        if (dxy <= 0) continue;
        double scale = std::max(d[ids[i]], d[ids[j]]);
        if (scale <= 0) continue;
        double q = std::abs(vals[i] - vals[j]) / (std::pow(dxy, gamma) * std::pow(scale, beta - gamma));
        r.c5 = std::max(r.c5, q);
      }
  }
  return r;
}

}  // namespace fracspec
