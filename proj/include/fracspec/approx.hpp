#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

#include "fracspec/geometry.hpp"

namespace fracspec {

enum class VertexTag { interior, cell_boundary, truncation_boundary, physical_boundary };

std::string to_string(VertexTag tag);

struct GraphVertex {
  Point coord;
  std::vector<std::size_t> cells;
  VertexTag tag = VertexTag::interior;
};

struct GraphEdge {
  std::size_t u = 0;
  std::size_t v = 0;
  double conductance = 0;
  std::size_t cell = 0;
};

// Vertices of one cell with the share of measure that cell gives each of them.
struct CellVertices {
  std::vector<std::size_t> ids;
  std::vector<double> weights;
};

struct GraphApprox {
  int level = 0;
  std::vector<GraphVertex> vertices;
  std::vector<GraphEdge> edges;
  std::vector<double> vertex_measure;
  std::size_t origin_vertex = 0;
  std::vector<CellVertices> cells;
  // Copied from the complex so distance fields need nothing else.
  std::vector<std::vector<std::size_t>> cell_graph;
  std::array<double, 4> embedding{1, 0, 0, 1};
  double template_diameter = 1.0;

  std::size_t vertex_count() const { return vertices.size(); }
  bool on_cell_boundary(std::size_t v) const { return vertices[v].tag != VertexTag::interior; }
  std::array<double, 2> position(std::size_t v) const;
  double total_measure() const;
};

inline constexpr std::size_t kDefaultVertexCap = 4'000'000;

GraphApprox refine(const CellComplex& complex, int m, std::size_t vertex_cap = kDefaultVertexCap);

// Per-template level-m subdivision in local coordinates (shared by every cell).
struct LocalGraph {
  std::vector<Point> points;
  std::vector<bool> is_corner;
  std::vector<double> measure;
  std::vector<GraphEdge> edges;
};
LocalGraph local_graph(const Template& tmpl, int m);

enum class MetricKind { euclidean_coordinate, cell_graph_scaled, effective_resistance };

std::string to_string(MetricKind kind);
MetricKind metric_from_string(const std::string& name);

struct DistanceField {
  MetricKind kind = MetricKind::euclidean_coordinate;
  std::vector<double> values;
};

inline constexpr std::size_t kDefaultDenseCap = 4000;

DistanceField distance_field(const GraphApprox& graph, MetricKind kind, std::size_t dense_cap = kDefaultDenseCap);

// Distance between two vertices of the same cell, where the metric allows it.
// Returns a negative value when the pair distance is not available for `kind`.
double pair_distance(const GraphApprox& graph, MetricKind kind, std::size_t a, std::size_t b);

// Writes vertices.csv and edges.csv into `dir`.
void write_graph_csv(const GraphApprox& graph, const std::filesystem::path& dir, const std::string& comment);

}  // namespace fracspec
