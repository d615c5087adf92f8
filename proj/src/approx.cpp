#include "fracspec/approx.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <stdexcept>
#include <unordered_map>

#include <Eigen/Dense>

#include "fracspec/csv.hpp"

namespace fracspec {

std::string to_string(VertexTag tag) {
  switch (tag) {
    case VertexTag::interior: return "interior";
    case VertexTag::cell_boundary: return "cell_boundary";
    case VertexTag::truncation_boundary: return "truncation_boundary";
    case VertexTag::physical_boundary: return "physical_boundary";
  }
  return "?";
}

std::string to_string(MetricKind kind) {
  switch (kind) {
    case MetricKind::euclidean_coordinate: return "euclidean_coordinate";
    case MetricKind::cell_graph_scaled: return "cell_graph_scaled";
    case MetricKind::effective_resistance: return "effective_resistance";
  }
  return "?";
}

MetricKind metric_from_string(const std::string& name) {
  if (name == "euclidean_coordinate") return MetricKind::euclidean_coordinate;
  if (name == "cell_graph_scaled") return MetricKind::cell_graph_scaled;
  if (name == "effective_resistance") return MetricKind::effective_resistance;
  throw std::invalid_argument("unknown metric '" + name + "'");
}

std::array<double, 2> GraphApprox::position(std::size_t v) const {
  double x = vertices[v].coord.x.to_double(), y = vertices[v].coord.y.to_double();
  return {embedding[0] * x + embedding[1] * y, embedding[2] * x + embedding[3] * y};
}

double GraphApprox::total_measure() const {
  double s = 0;
  for (double w : vertex_measure) s += w;
  return s;
}

LocalGraph local_graph(const Template& tmpl, int m) {
  if (m < 0) throw std::invalid_argument("negative refinement level");
  struct Word {
    AffineMap map;
    double measure;
    double conductance;
  };
  std::vector<Word> words{{AffineMap::identity(), 1.0, 1.0}};
  for (int g = 0; g < m; ++g) {
    std::vector<Word> next;
    next.reserve(words.size() * tmpl.maps.size());
    for (const Word& w : words)
      for (std::size_t i = 0; i < tmpl.maps.size(); ++i)
        next.push_back({w.map.compose(tmpl.maps[i]), w.measure * tmpl.measure_weights[i],
                        w.conductance / tmpl.resistance_weights[i]});
    words = std::move(next);
  }
  LocalGraph g;
  std::unordered_map<Point, std::size_t, PointHash> index;
  auto id_of = [&](const Point& p) {
    auto [it, fresh] = index.emplace(p, g.points.size());
    if (fresh) {
      g.points.push_back(p);
      g.measure.push_back(0.0);
    }
    return it->second;
  };
  const double share = 1.0 / static_cast<double>(tmpl.boundary.size());
  for (const Word& w : words) {
    std::vector<std::size_t> ids;
    for (const Point& p : tmpl.boundary) {
      std::size_t id = id_of(w.map.apply(p));
      g.measure[id] += w.measure * share;
      ids.push_back(id);
    }
    for (auto [a, b] : tmpl.base_edges) g.edges.push_back({ids[a], ids[b], w.conductance, 0});
  }
  g.is_corner.assign(g.points.size(), false);
  for (const Point& p : tmpl.boundary) g.is_corner[index.at(p)] = true;
  return g;
}

GraphApprox refine(const CellComplex& complex, int m, std::size_t vertex_cap) {
  if (m < 0) throw std::invalid_argument("negative refinement level");
  // Vertex count per cell grows like (#maps)^m; check before building anything large.
  double per_cell = std::pow(static_cast<double>(complex.tmpl.maps.size()), m) * complex.tmpl.boundary.size();
  if (per_cell * static_cast<double>(complex.cell_count()) > 2.0 * static_cast<double>(vertex_cap))
    throw std::length_error("refinement level exceeds vertex cap");
  LocalGraph local = local_graph(complex.tmpl, m);
  if (local.points.size() * complex.cell_count() > vertex_cap + complex.identifications())
    throw std::length_error("refinement level exceeds vertex cap");

  GraphApprox g;
  g.level = m;
  g.cell_graph = complex.cell_graph;
  g.embedding = complex.tmpl.embedding;
  g.template_diameter = complex.tmpl.diameter;
  g.cells.resize(complex.cell_count());
  std::unordered_map<Point, std::size_t, PointHash> index;
  index.reserve(local.points.size() * complex.cell_count());
  for (std::size_t k = 0; k < complex.cell_count(); ++k) {
    const AffineMap& place = complex.placements[k];
    CellVertices& cv = g.cells[k];
    cv.ids.resize(local.points.size());
    cv.weights = local.measure;
    for (std::size_t i = 0; i < local.points.size(); ++i) {
      Point p = place.apply(local.points[i]);
      auto [it, fresh] = index.emplace(p, g.vertices.size());
      if (fresh) {
        VertexTag tag = local.is_corner[i] ? VertexTag::cell_boundary : VertexTag::interior;
        if (local.is_corner[i] && complex.is_truncation_point(p)) tag = VertexTag::truncation_boundary;
        if (local.is_corner[i] && complex.is_physical_point(p)) tag = VertexTag::physical_boundary;
        g.vertices.push_back({p, {}, tag});
        g.vertex_measure.push_back(0.0);
      }
      std::size_t id = it->second;
      g.vertices[id].cells.push_back(k);
      g.vertex_measure[id] += local.measure[i];
      cv.ids[i] = id;
    }
    for (const GraphEdge& e : local.edges) g.edges.push_back({cv.ids[e.u], cv.ids[e.v], e.conductance, k});
  }
  auto it = index.find(complex.origin);
  if (it == index.end()) throw std::logic_error("origin is not a vertex of the approximation");
  g.origin_vertex = it->second;
  return g;
}

namespace {

std::vector<double> euclidean_distances(const GraphApprox& g) {
  auto o = g.position(g.origin_vertex);
  std::vector<double> d(g.vertex_count());
  for (std::size_t v = 0; v < d.size(); ++v) {
    auto p = g.position(v);
    d[v] = std::hypot(p[0] - o[0], p[1] - o[1]);
  }
  return d;
}

std::vector<double> cell_graph_distances(const GraphApprox& g) {
  const std::size_t n_cells = g.cells.size();
  std::vector<int> hop(n_cells, -1);
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
  std::vector<double> d(g.vertex_count());
  for (std::size_t v = 0; v < d.size(); ++v) {
    int best = -1;
    for (std::size_t c : g.vertices[v].cells)
      if (hop[c] >= 0 && (best < 0 || hop[c] < best)) best = hop[c];
    if (best < 0) throw std::logic_error("cell graph is disconnected");
    d[v] = best * g.template_diameter;
  }
  return d;
}

std::vector<double> resistance_distances(const GraphApprox& g, std::size_t cap) {
  const std::size_t n = g.vertex_count();
  if (n > cap) throw std::length_error("vertex count exceeds dense cap for effective resistance");
  // Grounding the origin turns the Laplacian pseudoinverse into an ordinary inverse
  // whose diagonal is R(0, x).
  const std::size_t o = g.origin_vertex;
  auto slot = [o](std::size_t v) { return v < o ? v : v - 1; };
  Eigen::MatrixXd L = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n - 1), static_cast<Eigen::Index>(n - 1));
  for (const GraphEdge& e : g.edges) {
    if (e.u != o) L(slot(e.u), slot(e.u)) += e.conductance;
    if (e.v != o) L(slot(e.v), slot(e.v)) += e.conductance;
    if (e.u != o && e.v != o) {
      L(slot(e.u), slot(e.v)) -= e.conductance;
      L(slot(e.v), slot(e.u)) -= e.conductance;
    }
  }
  std::vector<double> d(n, 0.0);
  if (n == 1) return d;
  Eigen::LLT<Eigen::MatrixXd> llt(L);
  if (llt.info() != Eigen::Success) throw std::runtime_error("conductance graph is disconnected");
  Eigen::MatrixXd inv = llt.solve(Eigen::MatrixXd::Identity(L.rows(), L.cols()));
  for (std::size_t v = 0; v < n; ++v)
    if (v != o) d[v] = inv(slot(v), slot(v));
  return d;
}

}  // namespace

DistanceField distance_field(const GraphApprox& graph, MetricKind kind, std::size_t dense_cap) {
  DistanceField f;
  f.kind = kind;
  switch (kind) {
    case MetricKind::euclidean_coordinate: f.values = euclidean_distances(graph); break;
    case MetricKind::cell_graph_scaled: f.values = cell_graph_distances(graph); break;
    case MetricKind::effective_resistance: f.values = resistance_distances(graph, dense_cap); break;
  }
  return f;
}

double pair_distance(const GraphApprox& graph, MetricKind kind, std::size_t a, std::size_t b) {
  if (a == b) return 0.0;
  switch (kind) {
    case MetricKind::euclidean_coordinate: {
      auto p = graph.position(a), q = graph.position(b);
      return std::hypot(p[0] - q[0], p[1] - q[1]);
    }
    case MetricKind::cell_graph_scaled: return graph.template_diameter;
    case MetricKind::effective_resistance: return -1.0;
  }
  return -1.0;
}

void write_graph_csv(const GraphApprox& graph, const std::filesystem::path& dir, const std::string& comment) {
  CsvTable vertices(comment, {"id", "x", "y", "measure", "tag"});
  for (std::size_t v = 0; v < graph.vertex_count(); ++v) {
    auto p = graph.position(v);
    vertices.add_row({static_cast<long long>(v), p[0], p[1], graph.vertex_measure[v], to_string(graph.vertices[v].tag)});
  }
  vertices.save(dir / "vertices.csv");
  CsvTable edges(comment, {"u", "v", "conductance"});
  for (const GraphEdge& e : graph.edges)
    edges.add_row({static_cast<long long>(e.u), static_cast<long long>(e.v), e.conductance});
  edges.save(dir / "edges.csv");
}

}  // namespace fracspec
