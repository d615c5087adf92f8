#include "fracspec/step_function.hpp"

#include <algorithm>
#include <stdexcept>

namespace fracspec {

StepFunction StepFunction::from_jumps(std::vector<std::pair<double, double>> jumps, double base, double domain_max) {
  std::sort(jumps.begin(), jumps.end());
  StepFunction f;
  f.base_ = base;
  f.domain_max_ = domain_max;
  double acc = base;
  for (const auto& [x, h] : jumps) {
    if (h < 0) throw std::invalid_argument("negative jump in step function");
    acc += h;
    if (!f.breakpoints_.empty() && f.breakpoints_.back() == x)
      f.values_.back() = acc;
    else {
      f.breakpoints_.push_back(x);
      f.values_.push_back(acc);
    }
  }
  return f;
}

double StepFunction::operator()(double x) const {
  if (x > domain_max_) throw std::domain_error("step function queried above its domain");
  auto it = std::upper_bound(breakpoints_.begin(), breakpoints_.end(), x);
  if (it == breakpoints_.begin()) return base_;
  return values_[static_cast<std::size_t>(it - breakpoints_.begin()) - 1];
}

double StepFunction::left_limit(double x) const {
  if (x > domain_max_) throw std::domain_error("step function queried above its domain");
  auto it = std::lower_bound(breakpoints_.begin(), breakpoints_.end(), x);
  if (it == breakpoints_.begin()) return base_;
  return values_[static_cast<std::size_t>(it - breakpoints_.begin()) - 1];
}

bool StepFunction::nondecreasing() const {
  double prev = base_;
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (values_[i] < prev) return false;
    if (i && !(breakpoints_[i] > breakpoints_[i - 1])) return false;
    prev = values_[i];
  }
  return true;
}

}  // namespace fracspec
