#include "fracspec/decimation.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <sstream>

#include "fracspec/approx.hpp"
#include "fracspec/geometry.hpp"

namespace fracspec {

namespace {

constexpr double kForbidden[] = {2.0, 5.0, 6.0};

bool forbidden(double y) {
  return std::any_of(std::begin(kForbidden), std::end(kForbidden), [y](double f) { return std::abs(y - f) < 1e-12; });
}

double pow5(int m) { return std::pow(5.0, m); }

// Level-base spectra: Dirichlet at level 1, Neumann at level 0.
std::pair<int, std::vector<LevelEigenvalue>> base_spectrum(BoundaryCondition bc) {
  if (bc == BoundaryCondition::dirichlet) return {1, {{2.0, 1}, {5.0, 2}}};
  return {0, {{0.0, 1}, {6.0, 2}}};
}

// One decimation step: continuations of every eigenvalue plus the newborn 5s and 6s.
std::vector<LevelEigenvalue> next_level(BoundaryCondition bc, const std::vector<LevelEigenvalue>& prev, int m) {
  std::vector<LevelEigenvalue> out;
  std::int64_t continued = 0;
  for (const auto& e : prev)
    for (double y : {decimation_minus(e.value), decimation_plus(e.value)}) {
      if (forbidden(y)) continue;
      out.push_back({y, e.multiplicity});
      continued += e.multiplicity;
    }
  std::int64_t born6 = sg_dimension(bc, m - 1);
  std::int64_t born5 = sg_dimension(bc, m) - continued - born6;
  if (born5 < 0) throw ValidationFailure("negative newborn multiplicity in decimation bookkeeping");
  if (born5 > 0) out.push_back({5.0, born5});
  if (born6 > 0) out.push_back({6.0, born6});
  return out;
}

std::vector<std::pair<double, std::int64_t>> merged(std::vector<std::pair<double, std::int64_t>> v, double tol) {
  std::sort(v.begin(), v.end());
  std::vector<std::pair<double, std::int64_t>> out;
  for (const auto& [x, k] : v) {
    if (!out.empty() && std::abs(x - out.back().first) <= tol * std::max(1.0, std::abs(x)))
      out.back().second += k;
    else
      out.emplace_back(x, k);
  }
  return out;
}

}  // namespace

std::int64_t DecimationSpectrum::total_multiplicity() const {
  std::int64_t s = 0;
  for (const auto& e : entries) s += e.multiplicity;
  return s;
}

double decimation_minus(double x) { return 2.0 * x / (5.0 + std::sqrt(std::max(25.0 - 4.0 * x, 0.0))); }

double decimation_plus(double x) { return 0.5 * (5.0 + std::sqrt(std::max(25.0 - 4.0 * x, 0.0))); }

double decimation_psi(double x) {
  // φ₋(y) = y/5 + O(y²); 60 steps put the iterate far below double resolution of the correction.
  double v = x, s = 1.0;
  for (int k = 0; k < 60; ++k) {
    v = decimation_minus(v);
    s *= 5.0;
  }
  return s * v;
}

std::int64_t sg_dimension(BoundaryCondition bc, int m) {
  std::int64_t p = 1;
  for (int i = 0; i <= m; ++i) p *= 3;
  return bc == BoundaryCondition::dirichlet ? (p - 3) / 2 : (p + 3) / 2;
}

std::vector<LevelEigenvalue> level_spectrum(BoundaryCondition bc, int m) {
  auto [m0, spec] = base_spectrum(bc);
  if (m < m0) {
    if (bc == BoundaryCondition::dirichlet && m == 0) return {};
    throw std::invalid_argument("level below the decimation base");
  }
  for (int level = m0 + 1; level <= m; ++level) spec = next_level(bc, spec, level);
  std::sort(spec.begin(), spec.end(), [](const auto& a, const auto& b) { return a.value < b.value; });
  return spec;
}

std::vector<std::pair<double, std::int64_t>> level_cell_eigenvalues(BoundaryCondition bc, int m) {
  std::vector<std::pair<double, std::int64_t>> out;
  for (const auto& e : level_spectrum(bc, m)) out.emplace_back(1.5 * pow5(m) * e.value, e.multiplicity);
  return merged(std::move(out), 0.0);
}

GateReport validate_against_dense(int max_level, double rel_tol) {
  GateReport report;
  report.max_level = max_level;
  const CellComplex cell = build_blowup(build_sg2_template(), {}, 0);
  for (int m = 0; m <= max_level; ++m) {
    const GraphApprox g = refine(cell, m);
    for (BoundaryCondition bc : {BoundaryCondition::dirichlet, BoundaryCondition::neumann}) {
      if (bc == BoundaryCondition::dirichlet && m == 0) continue;
      auto expected = merged(level_cell_eigenvalues(bc, m), rel_tol);
      Spectrum dense = dense_spectrum(assemble(g, CellCoupling::glued, bc));
      std::vector<std::pair<double, std::int64_t>> observed;
      for (double v : dense.eigenvalues) observed.emplace_back(v, 1);
      observed = merged(std::move(observed), rel_tol);
      std::ostringstream why;
      if (expected.size() != observed.size()) {
        why << "level " << m << " " << to_string(bc) << ": " << expected.size() << " distinct decimation values vs "
            << observed.size() << " dense clusters";
      } else {
        for (std::size_t i = 0; i < expected.size(); ++i) {
          double a = expected[i].first, b = observed[i].first;
          if (expected[i].second != observed[i].second ||
              std::abs(a - b) > rel_tol * std::max(1.0, std::abs(a))) {
            why << "level " << m << " " << to_string(bc) << ": decimation " << a << " x" << expected[i].second
                << " vs dense " << b << " x" << observed[i].second;
            break;
          }
        }
      }
      if (!why.str().empty()) {
        report.pass = false;
        report.diagnostics.push_back(why.str());
      }
    }
  }
  return report;
}

DecimationSpectrum enumerate_sg_spectrum(BoundaryCondition bc, double lambda_cap) {
  if (!(lambda_cap > 0)) throw std::invalid_argument("lambda_cap must be positive");
  static std::once_flag gate_once;
  static GateReport gate;
  std::call_once(gate_once, [] { gate = validate_against_dense(4); });
  if (!gate.pass) {
    std::string msg = "decimation failed the dense-spectrum gate:";
    for (const auto& d : gate.diagnostics) msg += "\n  " + d;
    throw ValidationFailure(msg);
  }

  DecimationSpectrum out;
  out.bc = bc;
  out.lambda_cap = lambda_cap;
  const double psi_min_plus = decimation_psi(2.5);  // φ₊ maps into [2.5, 5]
  const double slack = 1.0 + 1e-12;

  // Depth-first over '+' choices; a branch at level m with value x contributes the
  // limit along all-'-' continuation and spawns '+' children at every later level.
  auto follow = [&](auto&& self, int m, double x, std::int64_t mult, int gen, const std::string& word) -> void {
    double limit = 1.5 * pow5(m) * decimation_psi(x);
    if (limit > lambda_cap) return;
    out.entries.push_back({limit, mult, gen, word});
    double xj = x;
    std::string w = word;
    for (int j = 0; 1.5 * pow5(m + j + 1) * psi_min_plus <= lambda_cap * slack; ++j) {
      double y = decimation_plus(xj);
      if (!forbidden(y)) self(self, m + j + 1, y, mult, gen, w + "+");
      xj = decimation_minus(xj);
      w += "-";
    }
  };
  auto start = [&](int m, double value, std::int64_t mult) {
    if (mult <= 0) return;
    // A newborn 6 can only continue through φ₊(6) = 3.
    if (value == 6.0)
      follow(follow, m + 1, 3.0, mult, m, "+");
    else
      follow(follow, m, value, mult, m, "");
  };

  auto [m0, spec] = base_spectrum(bc);
  for (const auto& e : spec) start(m0, e.value, e.multiplicity);
  const double born_min = std::min(decimation_psi(5.0), 5.0 * decimation_psi(3.0));
  for (int m = m0 + 1; 1.5 * pow5(m) * born_min <= lambda_cap * slack; ++m) {
    spec = next_level(bc, spec, m);
    for (const auto& e : spec)
      if (e.value == 5.0 || e.value == 6.0) start(m, e.value, e.multiplicity);
  }
  std::sort(out.entries.begin(), out.entries.end(),
            [](const DecimationEntry& a, const DecimationEntry& b) { return a.eigenvalue < b.eigenvalue; });
  return out;
}

StepFunction single_cell_counting(const DecimationSpectrum& spec) {
  std::vector<std::pair<double, double>> jumps;
  jumps.reserve(spec.entries.size());
  for (const auto& e : spec.entries) jumps.emplace_back(e.eigenvalue, static_cast<double>(e.multiplicity));
  return StepFunction::from_jumps(std::move(jumps), 0.0, spec.lambda_cap);
}

GTable extract_G(const CountingFn& counting, double d_s, double period, double lambda_lo, double lambda_hi, int folds,
                 std::size_t samples) {
  if (!(lambda_lo > 0) || !(lambda_hi > lambda_lo) || !(period > 0) || samples < 2 || folds < 1)
    throw std::invalid_argument("invalid fold request");
  const double rho = std::exp(2 * period);
  const int available = static_cast<int>(std::floor(std::log(lambda_hi / lambda_lo) / std::log(rho) + 1e-12));
  if (available < 3) throw std::invalid_argument("counting function spans fewer than three periods");
  GTable t;
  t.d_s = d_s;
  t.period = period;
  t.folds_available = available;
  t.folds_used = std::min(folds, available);
  t.s.resize(samples);
  for (std::size_t i = 0; i < samples; ++i) t.s[i] = period * static_cast<double>(i) / static_cast<double>(samples);
  for (int k = 0; k < available; ++k) {
    const double base = lambda_hi * std::pow(rho, -(available - k));
    std::vector<double> g(samples);
    for (std::size_t i = 0; i < samples; ++i) {
      double lam = base * std::exp(2 * t.s[i]);
      g[i] = counting(lam) * std::pow(lam, -d_s / 2);
    }
    t.fold_values.push_back(std::move(g));
  }
  for (int k = 0; k + 1 < available; ++k) t.fold_distance.push_back(profile_distance(t.fold_values[k], t.fold_values[k + 1]));
  t.g.assign(samples, 0.0);
  for (int k = available - t.folds_used; k < available; ++k)
    for (std::size_t i = 0; i < samples; ++i) t.g[i] += t.fold_values[k][i] / t.folds_used;
  t.g_inf = *std::min_element(t.g.begin(), t.g.end());
  t.g_sup = *std::max_element(t.g.begin(), t.g.end());
  return t;
}

WeylFunction weyl_from_counting(const StepFunction& counting, double d_s, double period, int folds) {
  const double top = counting.domain_max();
  if (!std::isfinite(top)) throw std::invalid_argument("counting function needs a finite cap");
  const double rho = std::exp(2 * period);
  // Keep the top fold strictly below the cap.
  const double base = top * (1 - 1e-12) / std::pow(rho, folds);
  if (counting(base) <= 0) throw std::invalid_argument("counting function spans too few periods for the folds");
  return WeylFunction::folded(counting, d_s, period, base, folds);
}

double profile_distance(const std::vector<double>& a, const std::vector<double>& b) {
  double diff = 0, scale = 0;
  for (std::size_t i = 0; i < a.size() && i < b.size(); ++i) {
    diff = std::max(diff, std::abs(a[i] - b[i]));
    scale = std::max(scale, std::abs(b[i]));
  }
  return scale > 0 ? diff / scale : diff;
}

}  // namespace fracspec
