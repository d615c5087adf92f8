#pragma once

#include <cstddef>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include <Eigen/SparseCore>

#include "fracspec/approx.hpp"
#include "fracspec/potential.hpp"
#include "fracspec/sparse_ldlt.hpp"

namespace fracspec {

enum class BoundaryCondition { dirichlet, neumann };

std::string to_string(BoundaryCondition bc);

// Treatment of cell-boundary vertices: shared between cells (the glued operator),
// or every cell decoupled with its own Dirichlet or Neumann boundary.
enum class CellCoupling { glued, dirichlet, neumann };

// Generalized problem (E + M·diag(V)) u = λ M u on the free degrees of freedom.
// Constrained vertices: Dirichlet truncation rim (glued only), every cell corner
// under decoupled Dirichlet, and the physical boundary unless decoupled Neumann.
struct OperatorInstance {
  Eigen::SparseMatrix<double> stiffness;  // lower triangle, diagonal always stored
  Eigen::VectorXd mass;
  Eigen::VectorXd potential;  // effective V per degree of freedom
  CellCoupling coupling = CellCoupling::glued;
  BoundaryCondition truncation_bc = BoundaryCondition::dirichlet;
  // Graph vertex behind each degree of freedom.
  std::vector<std::size_t> dof_vertex;
  std::shared_ptr<const SparseLdlt> symbolic;

  std::size_t dimension() const { return dof_vertex.size(); }
};

OperatorInstance assemble(const GraphApprox& graph, CellCoupling coupling, BoundaryCondition truncation_bc,
                          const PotentialField* potential = nullptr);

struct CountResult {
  std::size_t count = 0;
  // Relative shift applied after a near-singular factorization (0 when none).
  double shift = 0.0;
  LdltStats stats;
};

// Number of generalized eigenvalues ≤ λ from the inertia of E + M·diag(V) − λM.
CountResult count_below(const OperatorInstance& op, double lambda);

inline constexpr double kEigenvalueShift = 1e-9;

enum class SpectrumSource { dense, decimation, analytic };

struct Spectrum {
  std::vector<double> eigenvalues;  // sorted, repeated by multiplicity
  // Factor already applied to raw graph eigenvalues; conductances and measures
  // are normalized so generalized eigenvalues need no further scaling.
  double renormalization = 1.0;
  SpectrumSource source = SpectrumSource::dense;

  std::size_t count_at_most(double lambda) const;
  // Clusters eigenvalues equal to relative tolerance `tol`: (value, multiplicity).
  std::vector<std::pair<double, std::size_t>> grouped(double tol) const;
};

Spectrum dense_spectrum(const OperatorInstance& op, std::size_t cap = kDefaultDenseCap);

// Coordinate text export: one "row col value" line per stored entry of E, M and V.
void export_matrix(const OperatorInstance& op, const std::filesystem::path& dir);

}  // namespace fracspec
