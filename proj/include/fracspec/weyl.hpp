#pragma once

#include "fracspec/step_function.hpp"

namespace fracspec {

// W(λ) = λ^{d_s/2}·G(½ log λ), either as an exact power law (G constant) or
// built from a counting function by averaging its Weyl-ratio folds over the
// topmost periods in s = ½ log λ, then extended periodically.
class WeylFunction {
 public:
  static WeylFunction power_law(double d_s, double coefficient);
  // Folds N over [λ_base·ρ^k, λ_base·ρ^{k+1}), k = 0..folds−1, ρ = e^{2·period}.
  static WeylFunction folded(StepFunction counting, double d_s, double period, double lambda_base, int folds);

  double operator()(double lambda) const;
  // Generalized inverse inf{λ ≥ 0 : W(λ) ≥ t}, by bisection.
  double inverse(double t) const;
  // Periodic profile G(s) = e^{−d_s s}·W(e^{2s}).
  double profile(double s) const;

  double d_s() const { return d_s_; }
  double period() const { return period_; }
  bool is_power_law() const { return power_law_; }

 private:
  bool power_law_ = true;
  double d_s_ = 1.0;
  double coefficient_ = 1.0;
  double period_ = 0.0;
  StepFunction counting_;
  double lambda_base_ = 1.0;
  int folds_ = 1;
  double rho_ = 1.0;    // λ ratio per period
  double kappa_ = 1.0;  // count ratio per period, ρ^{d_s/2}
};

}  // namespace fracspec
