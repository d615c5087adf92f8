#pragma once

#include <limits>
#include <utility>
#include <vector>

namespace fracspec {

// Right-continuous nondecreasing piecewise-constant function:
//   f(x) = base                      for x < breakpoints[0]
//   f(x) = values[i]                 for breakpoints[i] <= x < breakpoints[i+1]
// Queries above `domain_max` throw std::domain_error.
class StepFunction {
 public:
  StepFunction() = default;
  // Jumps (location, height > 0) in any order; equal locations merge.
  static StepFunction from_jumps(std::vector<std::pair<double, double>> jumps, double base = 0.0,
                                 double domain_max = std::numeric_limits<double>::infinity());

  double operator()(double x) const;
  double left_limit(double x) const;
  const std::vector<double>& breakpoints() const { return breakpoints_; }
  const std::vector<double>& values() const { return values_; }
  double base() const { return base_; }
  double domain_max() const { return domain_max_; }
  double total() const { return values_.empty() ? base_ : values_.back(); }
  // Jump height at breakpoints()[i].
  double jump(std::size_t i) const { return values_[i] - (i ? values_[i - 1] : base_); }
  bool nondecreasing() const;

 private:
  std::vector<double> breakpoints_;
  std::vector<double> values_;
  double base_ = 0.0;
  double domain_max_ = std::numeric_limits<double>::infinity();
};

}  // namespace fracspec
