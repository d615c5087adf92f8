#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "fracspec/operator.hpp"
#include "fracspec/step_function.hpp"
#include "fracspec/weyl.hpp"

namespace fracspec {

// Eigenvalue of the level-m SG(2) graph Laplacian in decimation units (values in [0, 6]).
struct LevelEigenvalue {
  double value;
  std::int64_t multiplicity;
};

struct DecimationEntry {
  double eigenvalue;  // limit eigenvalue (3/2)·5^m·ψ(x)
  std::int64_t multiplicity;
  int generation;      // level at which the branch is born
  std::string branch;  // '+'/'-' choices after birth; all later steps are '-'
};

struct DecimationSpectrum {
  BoundaryCondition bc = BoundaryCondition::dirichlet;
  double lambda_cap = 0;
  std::vector<DecimationEntry> entries;  // sorted by eigenvalue

  std::int64_t total_multiplicity() const;
};

// φ₋ in cancellation-free form, φ₊, and ψ(x) = lim 5^k φ₋^{(k)}(x).
double decimation_minus(double x);
double decimation_plus(double x);
double decimation_psi(double x);

// Number of free vertices of the level-m graph: (3^{m+1} ∓ 3)/2.
std::int64_t sg_dimension(BoundaryCondition bc, int m);

// Level-m graph spectrum by decimation (Dirichlet needs m >= 1).
std::vector<LevelEigenvalue> level_spectrum(BoundaryCondition bc, int m);

// Level-m single-cell generalized eigenvalues (3/2)·5^m·x, matching `refine` at level m.
std::vector<std::pair<double, std::int64_t>> level_cell_eigenvalues(BoundaryCondition bc, int m);

struct GateReport {
  bool pass = true;
  int max_level = 0;
  std::vector<std::string> diagnostics;
};

// Compares decimation with dense spectra of the refined single cell for every
// level up to `max_level`, both boundary conditions, multiplicity by multiplicity.
GateReport validate_against_dense(int max_level = 4, double rel_tol = 1e-9);

class ValidationFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Complete list of limit eigenvalues ≤ lambda_cap. The dense gate runs once per
// process before the first enumeration; failure throws ValidationFailure.
DecimationSpectrum enumerate_sg_spectrum(BoundaryCondition bc, double lambda_cap);

StepFunction single_cell_counting(const DecimationSpectrum& spec);

using CountingFn = std::function<double(double)>;

struct GTable {
  double d_s = 0;
  double period = 0;
  std::vector<double> s;  // offsets in [0, period)
  std::vector<double> g;  // average of the top folds
  double g_inf = 0;
  double g_sup = 0;
  int folds_available = 0;
  int folds_used = 0;
  // Relative sup-distance between consecutive folds, lowest period first.
  std::vector<double> fold_distance;
  std::vector<std::vector<double>> fold_values;
};

// Folds λ^{-d_s/2}·N(λ) over whole periods of s = ½ log λ inside [lambda_lo, lambda_hi),
// anchored at the top; averages the topmost `folds` of them.
GTable extract_G(const CountingFn& counting, double d_s, double period, double lambda_lo, double lambda_hi,
                 int folds = 4, std::size_t samples = 2048);

// W built from the top `folds` periods of a counting function below its domain cap.
WeylFunction weyl_from_counting(const StepFunction& counting, double d_s, double period, int folds = 4);

inline constexpr double kSgPeriod = 0.80471895621705018730;  // ½ log 5

// Sup-distance between two profile tables sampled on the same grid, relative to the second.
double profile_distance(const std::vector<double>& a, const std::vector<double>& b);

}  // namespace fracspec
