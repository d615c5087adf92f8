#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "fracspec/approx.hpp"
#include "fracspec/decimation.hpp"
#include "fracspec/geometry.hpp"
#include "fracspec/operator.hpp"

using namespace fracspec;

namespace {

const double kDs = 2 * std::log(3.0) / std::log(5.0);
const double kRho = 5.0;  // λ ratio per period

const DecimationSpectrum& spectrum(BoundaryCondition bc) {
  static const DecimationSpectrum d = enumerate_sg_spectrum(BoundaryCondition::dirichlet, 1e7);
  static const DecimationSpectrum n = enumerate_sg_spectrum(BoundaryCondition::neumann, 1e7);
  return bc == BoundaryCondition::dirichlet ? d : n;
}

}  // namespace

TEST_CASE("dense gate up to level 4") {
  auto report = validate_against_dense(4);
  CHECK(report.pass);
  CHECK(report.diagnostics.empty());
}

TEST_CASE("level dimensions") {
  for (int m = 1; m <= 6; ++m) {
    CHECK(sg_dimension(BoundaryCondition::dirichlet, m) == (static_cast<std::int64_t>(std::pow(3, m + 1)) - 3) / 2);
    CHECK(sg_dimension(BoundaryCondition::neumann, m) == (static_cast<std::int64_t>(std::pow(3, m + 1)) + 3) / 2);
    for (auto bc : {BoundaryCondition::dirichlet, BoundaryCondition::neumann}) {
      std::int64_t total = 0;
      for (const auto& e : level_spectrum(bc, m)) {
        CHECK(e.multiplicity > 0);
        CHECK(e.value >= 0.0);
        CHECK(e.value <= 6.0);
        total += e.multiplicity;
      }
      CHECK(total == sg_dimension(bc, m));
    }
  }
}

TEST_CASE("both branches invert the quadratic x = y(5 − y)") {
  for (double x : {1e-8, 0.01, 0.5, 2.0, 3.0, 5.0, 6.0}) {
    double lo = decimation_minus(x), hi = decimation_plus(x);
    if (x <= 6.25) {
      CHECK(lo * (5 - lo) == doctest::Approx(x).epsilon(1e-12));
      CHECK(hi * (5 - hi) == doctest::Approx(x).epsilon(1e-12));
      CHECK(lo <= hi);
    }
  }
}

TEST_CASE("renormalized limit map") {
  for (double x : {1e-10, 1e-7, 1e-5}) CHECK(decimation_psi(x) == doctest::Approx(x).epsilon(10 * x));
  CHECK(decimation_psi(0.0) == 0.0);
  // ψ(x) ≥ x: the limit eigenvalue lies above every graph approximation.
  for (double x : {0.1, 1.0, 2.0, 5.0}) CHECK(decimation_psi(x) > x);
  double prev = 0;
  for (double x = 0.01; x < 6; x += 0.01) {
    CHECK(decimation_psi(x) > prev);
    prev = decimation_psi(x);
  }
}

TEST_CASE("enumerated spectra") {
  const auto& d = spectrum(BoundaryCondition::dirichlet);
  const auto& n = spectrum(BoundaryCondition::neumann);
  REQUIRE(!n.entries.empty());
  CHECK(n.entries.front().eigenvalue == 0.0);
  CHECK(n.entries.front().multiplicity == 1);
  CHECK(d.entries.front().eigenvalue > 0.0);
  for (const auto* s : {&d, &n}) {
    CHECK(std::is_sorted(s->entries.begin(), s->entries.end(),
                         [](const auto& a, const auto& b) { return a.eigenvalue < b.eigenvalue; }));
    for (const auto& e : s->entries) {
      CHECK(e.multiplicity > 0);
      CHECK(e.eigenvalue <= s->lambda_cap);
    }
  }
  CHECK_THROWS(enumerate_sg_spectrum(BoundaryCondition::dirichlet, -1.0));
}

TEST_CASE("limit eigenvalues sit just above the level-6 graph eigenvalues") {
  auto g = refine(build_blowup(build_sg2_template(), {}, 0), 6);
  auto dense = dense_spectrum(assemble(g, CellCoupling::dirichlet, BoundaryCondition::dirichlet));
  const auto& d = spectrum(BoundaryCondition::dirichlet);
  double lowest = d.entries.front().eigenvalue;
  CHECK(lowest > dense.eigenvalues.front());
  CHECK(lowest / dense.eigenvalues.front() - 1 < 1e-3);
}

TEST_CASE("single-cell counting functions") {
  auto nd = single_cell_counting(spectrum(BoundaryCondition::dirichlet));
  auto nn = single_cell_counting(spectrum(BoundaryCondition::neumann));
  CHECK(nd(0.0) == 0.0);
  CHECK(nn(0.0) == 1.0);
  CHECK(nd.nondecreasing());
  for (double lambda = 0.5; lambda < 1e7; lambda *= 1.07) CHECK(nn(lambda) >= nd(lambda));
  CHECK_THROWS_AS(nd(2e7), std::domain_error);

  // Scaling λ by 5 multiplies the count by about 3, averaged over one period.
  for (const auto* f : {&nd, &nn}) {
    double sum = 0;
    const int samples = 400;
    for (int i = 0; i < samples; ++i) {
      double lambda = 1e4 * std::pow(kRho, static_cast<double>(i) / samples);
      sum += (*f)(kRho * lambda) / (*f)(lambda);
    }
    CHECK(sum / samples == doctest::Approx(3.0).epsilon(0.05));
  }

  // Weyl ratio bounded above and below over three periods.
  double lo = 1e300, hi = 0;
  for (double lambda = 1e4; lambda < 1e4 * std::pow(kRho, 3); lambda *= 1.01) {
    double r = nn(lambda) / std::pow(lambda, kDs / 2);
    lo = std::min(lo, r);
    hi = std::max(hi, r);
  }
  CHECK(lo > 0.0);
  CHECK(hi / lo < 3.0);
}

TEST_CASE("Weyl-ratio profile") {
  auto nd = single_cell_counting(spectrum(BoundaryCondition::dirichlet));
  auto nn = single_cell_counting(spectrum(BoundaryCondition::neumann));
  CHECK(kSgPeriod == doctest::Approx(0.5 * std::log(5.0)).epsilon(1e-15));
  const double top = 1e7 * (1 - 1e-12);
  auto gd = extract_G([&](double x) { return nd(x); }, kDs, kSgPeriod, 10.0, top, 4, 1024);
  auto gn = extract_G([&](double x) { return nn(x); }, kDs, kSgPeriod, 10.0, top, 4, 1024);
  CHECK(gd.folds_available >= 5);
  CHECK(gd.g_inf > 0);
  CHECK(gd.g_sup < 2 * gd.g_inf);
  // Folds converge, and the boundary condition washes out.
  CHECK(gd.fold_distance.back() < 0.01);
  CHECK(gn.fold_distance.back() < 0.01);
  CHECK(gd.fold_distance.back() < gd.fold_distance.front());
  CHECK(profile_distance(gd.g, gn.g) < 0.02);

  auto flat = extract_G([](double x) { return std::pow(x, kDs / 2); }, kDs, kSgPeriod, 1.0, 1e6, 3, 256);
  for (double v : flat.g) CHECK(v == doctest::Approx(1.0).epsilon(1e-12));
  CHECK_THROWS(extract_G([](double x) { return x; }, kDs, kSgPeriod, 1.0, 30.0));
}

TEST_CASE("empirical Weyl function is nondecreasing") {
  auto nn = single_cell_counting(spectrum(BoundaryCondition::neumann));
  auto w = weyl_from_counting(nn, kDs, kSgPeriod, 4);
  double prev = 0;
  for (double lambda = 1.0; lambda < 1e9; lambda *= 1.003) {
    double v = w(lambda);
    CHECK(v >= prev);
    prev = v;
  }
  // The profile repeats with the period.
  for (double s : {0.1, 0.37, 0.7}) CHECK(w.profile(s) == doctest::Approx(w.profile(s + 3 * kSgPeriod)).epsilon(1e-9));
}

TEST_CASE("spectral dimension from the counting function") {
  auto nd = single_cell_counting(spectrum(BoundaryCondition::dirichlet));
  std::vector<double> xs, ys;
  const double hi = 1e7 * (1 - 1e-9), lo = hi / std::pow(kRho, 4);
  for (int i = 0; i < 2000; ++i) {
    double lambda = lo * std::pow(hi / lo, i / 1999.0);
    xs.push_back(std::log(lambda));
    ys.push_back(std::log(nd(lambda)));
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sx += xs[i];
    sy += ys[i];
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
  }
  const double n = static_cast<double>(xs.size());
  double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  CHECK(2 * slope == doctest::Approx(kDs).epsilon(0.02));
}
