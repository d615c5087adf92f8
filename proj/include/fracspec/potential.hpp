#pragma once

#include <string>
#include <vector>

#include "fracspec/approx.hpp"
#include "fracspec/geometry.hpp"
#include "fracspec/step_function.hpp"

namespace fracspec {

enum class PotentialKind {
  power_distance,  // c·d(0,x)^β
  cell_power,      // c·(hop(cell)·diam)^β, constant on each cell
  graph_harmonic,  // discrete solution of ΔV = 1, shifted to min 0
  table,           // explicit per-vertex values
  zero
};

std::string to_string(PotentialKind kind);
PotentialKind potential_kind_from_string(const std::string& name);

struct PotentialSpec {
  PotentialKind kind = PotentialKind::power_distance;
  double c = 1.0;
  double beta = 2.0;
  MetricKind metric = MetricKind::cell_graph_scaled;
  std::vector<double> table;
  // Extra blow-up generations around the truncation for graph_harmonic; with 0
  // the solve uses the truncation's own rim and the minimum sits deep inside.
  int harmonic_padding = 0;

  void validate() const;
};

// A potential may be discontinuous across cell junctions (measure zero), so values
// are stored per (cell, vertex); `vertex_values` holds the measure-weighted mean.
struct PotentialField {
  std::vector<double> vertex_values;
  std::vector<std::vector<double>> cell_values;  // parallel to GraphApprox::cells[k].ids
  std::vector<double> cell_sup;
  std::vector<double> cell_inf;
  // Plug-back residual max |ΔV − 1| away from the rim (graph_harmonic only).
  double harmonic_residual = 0.0;

  static PotentialField zero(const GraphApprox& graph);
  static PotentialField from_vertex_values(const GraphApprox& graph, std::vector<double> values);
  static PotentialField from_cell_constants(const GraphApprox& graph, const std::vector<double>& per_cell);

  double min_value() const;
  double max_value() const;
};

// Γ-distance of every cell from the cells holding the origin vertex.
std::vector<int> origin_hops(const GraphApprox& graph);

// `complex` is needed only for graph_harmonic (rebuilt with padding).
PotentialField evaluate(const PotentialSpec& spec, const GraphApprox& graph, const DistanceField& distances,
                        const CellComplex* complex = nullptr);

enum class DistributionKind { exact, sup_envelope, inf_envelope };

// F(λ) = measure of {V ≤ λ}; envelope versions count whole cells.
StepFunction distribution(const PotentialField& field, const GraphApprox& graph, DistributionKind which);

// Largest λ whose sublevel sets stay inside the inner half (by Γ-distance) of the truncation.
double reliable_lambda_max(const PotentialField& field, const GraphApprox& graph);

struct DoublingReport {
  double c_hat = 0;
  double c_lower_half = 0;
  double c_upper_half = 0;
  std::size_t points_used = 0;
  bool stable = false;
  bool pass = false;
};

DoublingReport check_doubling(const StepFunction& f_sup, const StepFunction& f_inf, const std::vector<double>& grid);

struct EnvelopeReport {
  std::vector<double> lambda;
  std::vector<double> h;
  double h_max = 0;
  double top_decade_slope = 0;
  bool decreasing = false;
  bool pass = false;
};

EnvelopeReport check_envelope_ratio(const StepFunction& f_sup, const StepFunction& f_inf,
                                    const std::vector<double>& grid);

struct GrowthReport {
  double c3 = 0;
  double c4 = 0;
  double c5 = 0;
  bool c5_available = false;
  double c8 = 0;  // max over cells of (V^∧ − V^∨) / (diam^γ · d^{β−γ})
  std::vector<double> cell_gap;
  std::vector<double> cell_distance;
};

GrowthReport check_growth_and_hoelder(const PotentialField& field, const GraphApprox& graph,
                                      const DistanceField& distances, double beta, double gamma);

}  // namespace fracspec
