#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "fracspec/approx.hpp"
#include "fracspec/cell_spectra.hpp"
#include "fracspec/geometry.hpp"
#include "fracspec/operator.hpp"
#include "fracspec/potential.hpp"
#include "fracspec/step_function.hpp"
#include "fracspec/weyl.hpp"

namespace fracspec {

struct BracketedCount {
  double lambda = 0;
  std::int64_t lower = 0;  // Σ_cells N^D_K(λ − V^∧)
  std::int64_t upper = 0;  // Σ_cells N^N_K(λ − V^∨)
  std::optional<std::int64_t> direct;            // glued operator, Dirichlet rim
  std::optional<std::int64_t> direct_neumann;    // glued operator, Neumann rim
  // V ≥ 2λ on the whole truncation rim; the two direct counts must then agree.
  bool rim_certified = false;
};

// Inputs shared by every λ of a counting run. The cell spectra must be the
// discrete ones of the graph's level for the bracket to hold exactly.
class CountingProblem {
 public:
  CountingProblem(const GraphApprox& graph, const PotentialField& field, CellSpectra cells, bool with_direct);

  BracketedCount count(double lambda) const;
  std::vector<BracketedCount> count_grid(const std::vector<double>& grid) const;

  double rim_min_potential() const { return rim_min_; }
  const CellSpectra& cells() const { return cells_; }
  bool has_direct() const { return dirichlet_rim_.has_value(); }

 private:
  const GraphApprox& graph_;
  const PotentialField& field_;
  CellSpectra cells_;
  double rim_min_ = 0;
  std::optional<OperatorInstance> dirichlet_rim_;
  std::optional<OperatorInstance> neumann_rim_;
};

// One-shot form: refines `complex` at level m, evaluates the potential and counts.
BracketedCount bracketed_count(const CellComplex& complex, int m, const PotentialSpec& potential, double lambda);

struct BohrFunction {
  std::vector<double> lambda;
  std::vector<double> g;
  std::vector<double> g_sup;  // g^∧, cells flattened to V^∧
  std::vector<double> g_inf;  // g^∨, cells flattened to V^∨
  std::vector<double> r_sup;  // 𝓡^∧ = Σ [N^D_K − W](λ − V^∧)
  std::vector<double> r_inf;  // 𝓡^∨ = Σ [N^N_K − W](λ − V^∨)
};

// g by quadrature over every (cell, vertex) pair, g^b by the cell sums, 𝓡^b from
// the single-cell counting functions. Cells have unit mass.
BohrFunction bohr_g(const PotentialField& field, const GraphApprox& graph, const WeylFunction& weyl,
                    const CellSpectra& cells, const std::vector<double>& grid);

// ∫_0^{W(λ)} F(λ − W⁻¹(t)) dt, with W⁻¹ by bisection at the midpoint of every
// interval between consecutive breakpoints W(λ − v_j).
double bohr_g_layercake(const StepFunction& distribution, const WeylFunction& weyl, double lambda);

// max_b |g^{~b}/g^b − 1 + 𝓡^{~b}/g^b| per grid point; throws when g^∧ or g^∨ vanishes.
std::vector<double> bohr_error_bound(const BohrFunction& bohr);
double bohr_error_bound_at(const BohrFunction& bohr, std::size_t i);

// Mean of `values` over the trailing window (λ/ratio, λ] of each grid point; NaN
// where the grid does not reach a full window below λ.
std::vector<double> period_average(const std::vector<double>& lambda, const std::vector<double>& values,
                                   double ratio);
// Finite values at λ ≥ max λ / 10 never increase by more than `slack`.
bool nonincreasing_over_top_decade(const std::vector<double>& lambda, const std::vector<double>& values,
                                   double slack = 0.0);

struct WeakBohrReport {
  std::vector<double> lambda;
  std::vector<double> lambda_star;
  std::vector<double> inf_over_sup;  // F^∨(λ) / F^∧(λ*)
  std::vector<double> sup_over_inf;  // F^∧(λ) / F^∨(λ*)
  double top_decade_slope = 0;       // slope of log max|ratio − 1| against log λ
  bool pass = false;
};

using LambdaStarRule = std::function<double(double)>;
double default_lambda_star(double lambda);  // λ(1 + λ^{−1/2})

// F_sup = F^∧ (sup envelope, smaller), F_inf = F^∨ (inf envelope, larger).
WeakBohrReport weak_bohr_check(const StepFunction& f_sup, const StepFunction& f_inf, const std::vector<double>& grid,
                               const LambdaStarRule& rule = default_lambda_star);

struct DimensionFit {
  double d_s = 0;           // from the bracket midpoint
  double d_s_lower = 0;     // from N^∧ alone
  double d_s_upper = 0;     // from N^∨ alone
  double confidence = 0;    // half the spread between the two
  double residual_rms = 0;
};

// log N = (d/2)·log λ + c over grid points with positive counts; needs a decade.
DimensionFit fit_spectral_dimension(const std::vector<BracketedCount>& counts);
// Same fit on arbitrary positive samples.
double fit_dimension(const std::vector<double>& lambda, const std::vector<double>& counts);

}  // namespace fracspec
