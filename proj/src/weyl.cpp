#include "fracspec/weyl.hpp"

#include <cmath>
#include <stdexcept>

namespace fracspec {

namespace {

// exp() of a logarithm of an integer ratio should give the integer back exactly.
double snap(double v) {
  double r = std::round(v);
  return std::abs(v - r) <= 1e-12 * std::abs(v) ? r : v;
}

}  // namespace

WeylFunction WeylFunction::power_law(double d_s, double coefficient) {
  if (!(d_s > 0) || !(coefficient > 0)) throw std::invalid_argument("invalid power-law Weyl function");
  WeylFunction w;
  w.power_law_ = true;
  w.d_s_ = d_s;
  w.coefficient_ = coefficient;
  return w;
}

WeylFunction WeylFunction::folded(StepFunction counting, double d_s, double period, double lambda_base, int folds) {
  if (!(d_s > 0) || !(period > 0) || !(lambda_base > 0) || folds < 1)
    throw std::invalid_argument("invalid folded Weyl function");
  WeylFunction w;
  w.power_law_ = false;
  w.d_s_ = d_s;
  w.period_ = period;
  w.lambda_base_ = lambda_base;
  w.folds_ = folds;
  w.rho_ = snap(std::exp(2 * period));
  w.kappa_ = snap(std::exp(d_s * period));
  if (lambda_base * std::pow(w.rho_, folds) > counting.domain_max() * (1 + 1e-12))
    throw std::invalid_argument("folds exceed the counting function's domain");
  w.counting_ = std::move(counting);
  return w;
}

double WeylFunction::operator()(double lambda) const {
  if (lambda <= 0) return 0.0;
  if (power_law_) return coefficient_ * std::pow(lambda, d_s_ / 2);
  // Reduce λ into the base window [λ_base, λ_base·ρ) by whole periods.
  double x = lambda;
  double scale = 1.0;
  const double top = lambda_base_ * rho_;
  while (x >= top) {
    x /= rho_;
    scale *= kappa_;
  }
  while (x < lambda_base_) {
    x *= rho_;
    scale /= kappa_;
  }
  double sum = 0.0, weight = 1.0, y = x;
  for (int k = 0; k < folds_; ++k) {
    sum += counting_(y) * weight;
    y *= rho_;
    weight /= kappa_;
  }
  return scale * sum / folds_;
}

double WeylFunction::inverse(double t) const {
  if (t <= 0) return 0.0;
  double lo = 0.0, hi = 1.0;
  while ((*this)(hi) < t) {
    lo = hi;
    hi *= 2;
    if (!std::isfinite(hi)) throw std::domain_error("Weyl function never reaches the requested level");
  }
  for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
    double mid = 0.5 * (lo + hi);
    if ((*this)(mid) >= t)
      hi = mid;
    else
      lo = mid;
  }
  return hi;
}

double WeylFunction::profile(double s) const {
  return std::exp(-d_s_ * s) * (*this)(std::exp(2 * s));
}

}  // namespace fracspec
