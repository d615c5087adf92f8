#pragma once

#include <string>

#include "fracspec/decimation.hpp"
#include "fracspec/geometry.hpp"
#include "fracspec/step_function.hpp"
#include "fracspec/weyl.hpp"

namespace fracspec {

// Single-cell counting functions N^D_K and N^N_K for a unit-mass cell.
// `discrete` spectra belong to the level-m graph that `refine` produces and are
// complete; limit spectra belong to the continuum cell and stop at `cap`.
struct CellSpectra {
  std::string template_name;
  int level = -1;  // −1 for the continuum limit
  bool discrete = false;
  double cap = 0;
  StepFunction dirichlet;
  StepFunction neumann;
  double d_s = 0;
  double period = 0;  // log-period of the Weyl ratio in s = ½ log λ (0 when not periodic)

  const StepFunction& get(BoundaryCondition bc) const {
    return bc == BoundaryCondition::dirichlet ? dirichlet : neumann;
  }
};

CellSpectra sg_level_cell_spectra(int m);
CellSpectra sg_limit_cell_spectra(double cap);
// Unit interval: level m has 2^m equal edges; the limit spectrum is (kπ)².
CellSpectra interval_level_cell_spectra(int m);
CellSpectra interval_limit_cell_spectra(double cap);

CellSpectra level_cell_spectra(const Template& tmpl, int m);
CellSpectra limit_cell_spectra(const Template& tmpl, double cap);

// W for the template: λ^{1/2}/π on the interval, the Neumann fold on SG(2).
WeylFunction template_weyl(const CellSpectra& limit, int folds = 4);

}  // namespace fracspec
