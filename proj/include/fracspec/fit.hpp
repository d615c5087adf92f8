#pragma once

#include <vector>

namespace fracspec {

struct LineFit {
  double slope = 0;
  double intercept = 0;
  double residual_rms = 0;
};

// Ordinary least squares y ≈ slope·x + intercept. Needs two distinct x values.
LineFit fit_line(const std::vector<double>& xs, const std::vector<double>& ys);

// n points from a to b with constant ratio (a, b > 0).
std::vector<double> geometric_grid(double a, double b, std::size_t n);

}  // namespace fracspec
