#include "fracspec/operator.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <stdexcept>

#include <Eigen/Dense>

#include "fracspec/csv.hpp"

namespace fracspec {

std::string to_string(BoundaryCondition bc) { return bc == BoundaryCondition::dirichlet ? "dirichlet" : "neumann"; }

OperatorInstance assemble(const GraphApprox& graph, CellCoupling coupling, BoundaryCondition truncation_bc,
                          const PotentialField* potential) {
  if (potential && potential->cell_values.size() != graph.cells.size())
    throw std::invalid_argument("potential does not match the graph");
  OperatorInstance op;
  op.coupling = coupling;
  op.truncation_bc = truncation_bc;

  auto constrained = [&](std::size_t v) {
    switch (graph.vertices[v].tag) {
      case VertexTag::interior: return false;
      case VertexTag::cell_boundary: return coupling == CellCoupling::dirichlet;
      case VertexTag::truncation_boundary:
        return coupling == CellCoupling::dirichlet ||
               (coupling == CellCoupling::glued && truncation_bc == BoundaryCondition::dirichlet);
      case VertexTag::physical_boundary: return coupling != CellCoupling::neumann;
    }
    return false;
  };

  // Degree of freedom for vertex v seen from cell k; -1 when constrained.
  const std::size_t nv = graph.vertex_count();
  std::vector<long> shared(nv, -1);
  std::map<std::pair<std::size_t, std::size_t>, long> split;
  long next = 0;
  for (std::size_t k = 0; k < graph.cells.size(); ++k)
    for (std::size_t v : graph.cells[k].ids) {
      if (constrained(v)) continue;
      bool decoupled = coupling == CellCoupling::neumann && graph.on_cell_boundary(v);
      if (decoupled) {
        if (split.emplace(std::make_pair(k, v), next).second) {
          op.dof_vertex.push_back(v);
          ++next;
        }
      } else if (shared[v] < 0) {
        shared[v] = next++;
        op.dof_vertex.push_back(v);
      }
    }
  if (next == 0) throw std::invalid_argument("empty free-vertex set");
  auto dof = [&](std::size_t k, std::size_t v) -> long {
    if (constrained(v)) return -1;
    if (coupling == CellCoupling::neumann && graph.on_cell_boundary(v)) return split.at({k, v});
    return shared[v];
  };

  op.mass = Eigen::VectorXd::Zero(next);
  Eigen::VectorXd weighted_v = Eigen::VectorXd::Zero(next);
  for (std::size_t k = 0; k < graph.cells.size(); ++k) {
    const auto& cv = graph.cells[k];
    for (std::size_t i = 0; i < cv.ids.size(); ++i) {
      long d = dof(k, cv.ids[i]);
      if (d < 0) continue;
      op.mass[d] += cv.weights[i];
      if (potential) weighted_v[d] += cv.weights[i] * potential->cell_values[k][i];
    }
  }
  op.potential = weighted_v.cwiseQuotient(op.mass);

  std::vector<Eigen::Triplet<double>> t;
  t.reserve(3 * graph.edges.size() + static_cast<std::size_t>(next));
  for (long i = 0; i < next; ++i) t.emplace_back(i, i, 0.0);
  for (const GraphEdge& e : graph.edges) {
    long a = dof(e.cell, e.u), b = dof(e.cell, e.v);
    if (a >= 0) t.emplace_back(a, a, e.conductance);
    if (b >= 0) t.emplace_back(b, b, e.conductance);
    if (a >= 0 && b >= 0) t.emplace_back(std::max(a, b), std::min(a, b), -e.conductance);
  }
  op.stiffness.resize(next, next);
  op.stiffness.setFromTriplets(t.begin(), t.end());
  op.stiffness.makeCompressed();
  op.symbolic = std::make_shared<const SparseLdlt>(op.stiffness);
  return op;
}

namespace {

Inertia shifted_inertia(const OperatorInstance& op, double lambda, LdltStats* stats) {
  Eigen::SparseMatrix<double> a = op.stiffness;
  for (Eigen::Index j = 0; j < a.outerSize(); ++j) {
    // Diagonal is the first stored entry of each lower-triangular column.
    double* diag = a.valuePtr() + a.outerIndexPtr()[j];
    *diag += op.mass[j] * (op.potential[j] - lambda);
  }
  return op.symbolic->inertia(a, stats);
}

}  // namespace

CountResult count_below(const OperatorInstance& op, double lambda) {
  if (!std::isfinite(lambda)) throw std::invalid_argument("count_below needs a finite lambda");
  CountResult r;
  Inertia in = shifted_inertia(op, lambda, &r.stats);
  if (r.stats.near_singular) {
    r.shift = kEigenvalueShift;
    double shifted = lambda + kEigenvalueShift * std::max(std::abs(lambda), 1.0);
    in = shifted_inertia(op, shifted, &r.stats);
  }
  r.count = in.negative + in.zero;
  return r;
}

std::size_t Spectrum::count_at_most(double lambda) const {
  return static_cast<std::size_t>(std::upper_bound(eigenvalues.begin(), eigenvalues.end(), lambda) -
                                  eigenvalues.begin());
}

std::vector<std::pair<double, std::size_t>> Spectrum::grouped(double tol) const {
  std::vector<std::pair<double, std::size_t>> out;
  for (double v : eigenvalues) {
    if (!out.empty() && std::abs(v - out.back().first) <= tol * std::max(1.0, std::abs(v)))
      ++out.back().second;
    else
      out.emplace_back(v, 1);
  }
  return out;
}

Spectrum dense_spectrum(const OperatorInstance& op, std::size_t cap) {
  const auto n = static_cast<Eigen::Index>(op.dimension());
  if (op.dimension() > cap) throw std::length_error("operator dimension exceeds dense cap");
  Eigen::SparseMatrix<double> full = op.stiffness.selfadjointView<Eigen::Lower>();
  Eigen::MatrixXd h = Eigen::MatrixXd(full);
  for (Eigen::Index i = 0; i < n; ++i) h(i, i) += op.mass[i] * op.potential[i];
  Eigen::VectorXd s = op.mass.cwiseSqrt().cwiseInverse();
  h = s.asDiagonal() * h * s.asDiagonal();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw std::runtime_error("dense eigensolver failed");
  Spectrum sp;
  sp.eigenvalues.assign(es.eigenvalues().data(), es.eigenvalues().data() + n);
  std::sort(sp.eigenvalues.begin(), sp.eigenvalues.end());
  sp.source = SpectrumSource::dense;
  return sp;
}

void export_matrix(const OperatorInstance& op, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  std::ofstream e(dir / "stiffness.coo"), m(dir / "mass.coo"), v(dir / "potential.coo");
  if (!e || !m || !v) throw std::runtime_error("cannot write matrix export to " + dir.string());
  for (Eigen::Index j = 0; j < op.stiffness.outerSize(); ++j)
    for (Eigen::SparseMatrix<double>::InnerIterator it(op.stiffness, j); it; ++it)
      e << it.row() << ' ' << it.col() << ' ' << format_double(it.value()) << '\n';
  for (Eigen::Index i = 0; i < op.mass.size(); ++i) {
    m << i << ' ' << i << ' ' << format_double(op.mass[i]) << '\n';
    v << i << ' ' << i << ' ' << format_double(op.potential[i]) << '\n';
  }
}

}  // namespace fracspec
