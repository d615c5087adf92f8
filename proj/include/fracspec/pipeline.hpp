#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "fracspec/approx.hpp"
#include "fracspec/bohr.hpp"
#include "fracspec/geometry.hpp"
#include "fracspec/potential.hpp"
#include "fracspec/scenario.hpp"
#include "fracspec/trace.hpp"

namespace fracspec {

CellComplex build_complex(const SpaceSpec& space);

// Everything derived from a scenario before any spectral work.
struct Workspace {
  Scenario scenario;
  CellComplex complex;
  GraphApprox graph;
  DistanceField distances;
  PotentialField field;

  // "scenario=<hash> version=<tool version>"
  std::string csv_comment() const;
};

Workspace prepare(const Scenario& scenario);

// Grids with "auto" ends resolved: λ_max = reliable_lambda_max (half the rim
// minimum for graph_harmonic), λ_min = λ_max/100.
std::vector<double> lambda_grid(const Workspace& ws);
std::vector<double> t_grid(const Workspace& ws);

struct BuildSummary {
  std::size_t cells = 0;
  std::size_t vertices = 0;
  std::size_t edges = 0;
  int cell_radius = 0;
  std::optional<double> mass_dimension;
};
BuildSummary run_build(const Workspace& ws, const std::filesystem::path& out);

struct SpectrumSummary {
  bool gate_pass = false;
  std::size_t dirichlet_eigenvalues = 0;  // with multiplicity, ≤ cap
  std::size_t neumann_eigenvalues = 0;
  double d_s_fit = 0;
  int periods_fitted = 0;
  std::vector<double> fold_distance;  // consecutive Weyl-ratio folds, lowest first
  std::optional<std::size_t> dense_dimension;
};
SpectrumSummary run_spectrum(const Workspace& ws, const std::filesystem::path& out);

struct CountSummary {
  std::vector<BracketedCount> counts;
  std::size_t bracket_violations = 0;
  std::size_t rim_disagreements = 0;  // certified λ where the two direct counts differ
  std::optional<DimensionFit> fit;
  std::optional<double> direct_fit;
};
CountSummary run_count(const Workspace& ws, const std::filesystem::path& out);

struct BohrSummary {
  CountSummary count;
  BohrFunction bohr;
  std::vector<double> layercake;
  std::vector<double> bound;
  std::vector<double> bound_averaged;  // over one log-period when W has one
  double max_layercake_deviation = 0;
  std::size_t containment_violations = 0;  // |N/g − 1| above the bound
  bool bound_decreasing = false;
  std::optional<WeakBohrReport> weak;
};
BohrSummary run_bohr(const Workspace& ws, const std::filesystem::path& out);

struct TraceSummary {
  TraceTable table;
  FactorizationTable factorization;
  TraceWindow window;
  bool contains_one = false;  // over the reliable window
  std::size_t window_points = 0;
  double width_at_t_min = 0;
  std::optional<double> d_s_fit;
};
TraceSummary run_trace(const Workspace& ws, const std::filesystem::path& out);

struct ValidateSummary {
  std::optional<DoublingReport> doubling;
  EnvelopeReport envelope;
  GrowthReport growth;
  double harmonic_residual = 0;
};
ValidateSummary run_validate(const Workspace& ws, const std::filesystem::path& out);

// All of the above plus summary.csv and a gnuplot script over the data files.
void run_report(const Workspace& ws, const std::filesystem::path& out);

}  // namespace fracspec
