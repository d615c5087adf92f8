#pragma once

#include <vector>

#include "fracspec/approx.hpp"
#include "fracspec/cell_spectra.hpp"
#include "fracspec/operator.hpp"
#include "fracspec/potential.hpp"
#include "fracspec/step_function.hpp"

namespace fracspec {

struct CellTrace {
  double value = 0;       // Σ mult·e^{−λt} over the known spectrum
  double tail_bound = 0;  // bound on the part above the cap
};

inline constexpr double kMinCapTimesT = 40.0;

// Trace of a counting function known up to its domain cap Λ. A finite cap needs
// tΛ ≥ 40; the tail is bounded by C·t^{−d/2}·Γ(d/2 + 1, tΛ), C = sup λ^{−d/2}N(λ).
CellTrace cell_trace(const StepFunction& counting, double t, double d_s);
// Complete finite spectrum: no tail.
CellTrace cell_trace(const Spectrum& spectrum, double t);

struct TraceTable {
  std::vector<double> t;
  std::vector<double> l_lower;  // L^∧ = L^D_K·Σ e^{−tV^∧}
  std::vector<double> l_upper;  // L^∨ = (L^N_K + tail)·Σ e^{−tV^∨}
  std::vector<double> f_t;      // Σ μ(x)e^{−tV(x)}
  std::vector<double> f_lower;  // Σ_cells e^{−tV^∧}
  std::vector<double> f_upper;  // Σ_cells e^{−tV^∨}
  std::vector<double> cell_dirichlet;
  std::vector<double> cell_neumann;
  std::vector<double> tail_bound;  // absolute, already folded into l_upper
  // Share of 𝓕^∨ carried by cells touching the truncation rim.
  std::vector<double> rim_share;
};

TraceTable bracketed_trace(const GraphApprox& graph, const PotentialField& field, const CellSpectra& cells,
                           const std::vector<double>& t_grid);

struct FactorizationTable {
  std::vector<double> t;
  std::vector<double> lower;  // L^∧ / (L_K·𝓕)
  std::vector<double> upper;  // L^∨ / (L_K·𝓕)
  std::vector<double> ratio;  // bracket midpoint over L_K·𝓕
};

// L_K is the mean of the Dirichlet and Neumann cell traces, so the bracket
// always straddles 1 up to rounding.
FactorizationTable factorization_ratio(const TraceTable& table);

struct TraceWindow {
  double t_min = 0;
  double t_max = 0;
  double t_min_cap = 0;  // from tΛ ≥ 40
  double t_min_rim = 0;  // from rim share ≤ tolerance
};

// Smallest grid t at which both the spectral cap and the rim share allow a
// reliable trace; t_max is the top of the grid.
TraceWindow reliable_window(const TraceTable& table, double cap, double rim_tolerance = 1e-6);

// −2 × slope of log L against log t, L the bracket midpoint; needs a decade of t.
double fit_spectral_dimension_t(const TraceTable& table);

}  // namespace fracspec
