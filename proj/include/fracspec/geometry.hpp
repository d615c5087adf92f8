#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <vector>

#include "fracspec/rational.hpp"

namespace fracspec {

// Compact self-similar cell K given by contractions fixing its boundary vertices.
// Coordinates are lattice coordinates; `embedding` maps them to the plane.
struct Template {
  std::string name;
  std::vector<Point> boundary;
  std::vector<AffineMap> maps;
  std::vector<double> measure_weights;
  std::vector<double> resistance_weights;
  // Level-0 graph on the boundary vertices, unit conductance per edge.
  std::vector<std::pair<std::size_t, std::size_t>> base_edges;
  std::array<double, 4> embedding{1, 0, 0, 1};
  double diameter = 1.0;
  double spectral_dimension_hint = 0.0;

  std::size_t boundary_vertex_count() const { return boundary.size(); }
  // Root d of sum_i (r_i mu_i)^{d/2} = 1.
  double spectral_dimension() const;
  std::array<double, 2> embed(const Point& p) const;
  // Throws std::invalid_argument if any structural invariant fails.
  void validate() const;
};

Template build_sg2_template();
Template build_interval_template();
Template template_by_name(const std::string& name);

struct CellComplex {
  Template tmpl;
  std::string builder;
  std::vector<AffineMap> placements;
  std::vector<std::vector<std::size_t>> cell_graph;
  Point origin{};
  std::size_t origin_cell = 0;
  // Outer rim where the infinite space was cut; sorted.
  std::vector<Point> truncation_boundary;
  // Genuine boundary of the underlying space (the half-line endpoint); sorted.
  std::vector<Point> physical_boundary;
  std::vector<std::string> warnings;
  // Blow-up parameters, kept so padded versions can be rebuilt.
  std::vector<int> word;
  int generations = 0;

  std::size_t cell_count() const { return placements.size(); }
  // Each cell carries unit measure.
  double total_measure() const { return static_cast<double>(placements.size()); }
  std::vector<Point> corners(std::size_t cell) const;
  // Sum over cells of corner count minus the number of distinct corners.
  std::size_t identifications() const;
  // Breadth-first Γ-distances from `center`; unreachable cells get -1.
  std::vector<int> hop_distances(std::size_t center) const;
  bool is_truncation_point(const Point& p) const;
  bool is_physical_point(const Point& p) const;
};

// Cells Φ∘Ψ_v for all |v| = generations, Φ = Ψ_{w1}^{-1}∘…∘Ψ_{wg}^{-1}.
// Letters are 1-based map indices.
CellComplex build_blowup(const Template& tmpl, const std::vector<int>& word, int generations);
CellComplex build_ladder(const Template& tmpl, int length);
CellComplex build_hexagonal(const Template& tmpl, int radius);
CellComplex build_trifield(const Template& tmpl, int radius);
CellComplex build_interval_lattice(int cells);

std::size_t cell_graph_ball(const CellComplex& complex, std::size_t center, int r);
// Least-squares slope of log|B(center, r)| against log r over integer r in [r_min, r_max].
double estimate_mass_dimension(const CellComplex& complex, std::size_t center, int r_min, int r_max);

std::string complex_to_json(const CellComplex& complex);
CellComplex complex_from_json(const std::string& text);

// Checks pairwise cell intersections: two cells may only share corner points.
bool cells_meet_only_at_corners(const CellComplex& complex);

}  // namespace fracspec
