#include "fracspec/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "fracspec/cell_spectra.hpp"
#include "fracspec/csv.hpp"
#include "fracspec/decimation.hpp"
#include "fracspec/fit.hpp"
#include "fracspec/operator.hpp"
#include "fracspec/parallel.hpp"

namespace fracspec {

namespace fs = std::filesystem;

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

long long ll(std::int64_t v) { return static_cast<long long>(v); }

double weyl_period_ratio(const WeylFunction& w) { return w.is_power_law() ? 0.0 : std::exp(2 * w.period()); }

int cell_radius(const Workspace& ws) {
  auto hop = origin_hops(ws.graph);
  return hop.empty() ? 0 : *std::max_element(hop.begin(), hop.end());
}

}  // namespace

CellComplex build_complex(const SpaceSpec& space) {
  const Template tmpl = template_by_name(space.template_name);
  if (space.builder == "blowup") {
    std::vector<int> word = space.word;
    if (word.empty() && space.generations > 0) throw std::invalid_argument("blow-up needs a word");
    // A short word is repeated periodically, with room for padded rebuilds.
    for (std::size_t i = word.size(); !word.empty() && static_cast<int>(word.size()) < space.generations + 8; ++i)
      word.push_back(word[i % space.word.size()]);
    return build_blowup(tmpl, word, space.generations);
  }
  if (space.builder == "cell") return build_blowup(tmpl, {}, 0);
  if (space.builder == "ladder") return build_ladder(tmpl, space.length);
  if (space.builder == "hexagonal") return build_hexagonal(tmpl, space.radius);
  if (space.builder == "trifield") return build_trifield(tmpl, space.radius);
  if (space.builder == "interval") return build_interval_lattice(space.cells);
  throw std::invalid_argument("unknown builder '" + space.builder + "'");
}

std::string Workspace::csv_comment() const {
  return "scenario=" + scenario.hash() + " version=" + kToolVersion;
}

Workspace prepare(const Scenario& scenario) {
  scenario.validate();
  Workspace ws;
  ws.scenario = scenario;
  ws.complex = build_complex(scenario.space);
  ws.graph = refine(ws.complex, scenario.level);
  if (scenario.potential.kind == PotentialKind::power_distance)
    ws.distances = distance_field(ws.graph, scenario.potential.metric);
  ws.field = evaluate(scenario.potential, ws.graph, ws.distances, &ws.complex);
  return ws;
}

std::vector<double> lambda_grid(const Workspace& ws) {
  const auto& g = ws.scenario.lambda;
  double hi = g.max ? *g.max : reliable_lambda_max(ws.field, ws.graph);
  if (!g.max && ws.scenario.potential.kind == PotentialKind::graph_harmonic) {
    // The minimum is not at the origin; keep the whole rim classically forbidden instead.
    double rim = std::numeric_limits<double>::infinity();
    for (std::size_t v = 0; v < ws.graph.vertex_count(); ++v)
      if (ws.graph.vertices[v].tag == VertexTag::truncation_boundary) rim = std::min(rim, ws.field.vertex_values[v]);
    hi = rim / 2;
  }
  if (!std::isfinite(hi) || !(hi > 0)) throw std::invalid_argument("λ grid needs an explicit maximum here");
  double lo = g.min ? *g.min : hi / 100;
  if (!(hi > lo)) throw std::invalid_argument("λ grid maximum must exceed its minimum");
  return geometric_grid(lo, hi, std::max<std::size_t>(g.points, 2));
}

std::vector<double> t_grid(const Workspace& ws) {
  const auto& g = ws.scenario.t;
  if (!g.min || !g.max || g.points < 2) throw std::invalid_argument("t grid needs min, max and points");
  return geometric_grid(*g.min, *g.max, g.points);
}

BuildSummary run_build(const Workspace& ws, const fs::path& out) {
  BuildSummary s;
  s.cells = ws.graph.cells.size();
  s.vertices = ws.graph.vertex_count();
  s.edges = ws.graph.edges.size();
  s.cell_radius = cell_radius(ws);
  const int r_max = ws.scenario.mass_r_max > 0 ? ws.scenario.mass_r_max : s.cell_radius / 4;
  if (r_max > ws.scenario.mass_r_min) {
    try {
      s.mass_dimension = estimate_mass_dimension(ws.complex, ws.complex.origin_cell, ws.scenario.mass_r_min, r_max);
    } catch (const std::invalid_argument&) {
    }
  }
  write_text(out / "complex.json", complex_to_json(ws.complex));
  write_graph_csv(ws.graph, out, ws.csv_comment());
  auto hop = origin_hops(ws.graph);
  CsvTable cells(ws.csv_comment(), {"cell", "hop", "v_sup", "v_inf", "mass"});
  for (std::size_t k = 0; k < ws.graph.cells.size(); ++k) {
    double mass = std::accumulate(ws.graph.cells[k].weights.begin(), ws.graph.cells[k].weights.end(), 0.0);
    cells.add_row({static_cast<long long>(k), static_cast<long long>(hop[k]), ws.field.cell_sup[k],
                   ws.field.cell_inf[k], mass});
  }
  cells.save(out / "cells.csv");
  return s;
}

SpectrumSummary run_spectrum(const Workspace& ws, const fs::path& out) {
  SpectrumSummary s;
  const Template& tmpl = ws.complex.tmpl;
  const double cap = ws.scenario.spectrum_cap;
  if (tmpl.name == "sg2") {
    GateReport gate = validate_against_dense(4);
    s.gate_pass = gate.pass;
    CsvTable gt(ws.csv_comment(), {"max_level", "pass", "diagnostic"});
    gt.add_row({static_cast<long long>(gate.max_level), static_cast<long long>(gate.pass),
                gate.diagnostics.empty() ? std::string() : gate.diagnostics.front()});
    gt.save(out / "gate.csv");
    if (!gate.pass) throw ValidationFailure("decimation failed the dense-spectrum gate");
    for (BoundaryCondition bc : {BoundaryCondition::dirichlet, BoundaryCondition::neumann}) {
      DecimationSpectrum spec = enumerate_sg_spectrum(bc, cap);
      CsvTable t(ws.csv_comment(), {"eigenvalue", "multiplicity", "generation", "branch"});
      for (const auto& e : spec.entries)
        t.add_row({e.eigenvalue, ll(e.multiplicity), static_cast<long long>(e.generation), e.branch});
      t.save(out / ("spectrum_" + to_string(bc) + ".csv"));
      (bc == BoundaryCondition::dirichlet ? s.dirichlet_eigenvalues : s.neumann_eigenvalues) =
          static_cast<std::size_t>(spec.total_multiplicity());
    }
  } else {
    s.gate_pass = true;
  }
  const CellSpectra limit = limit_cell_spectra(tmpl, cap);
  if (tmpl.name != "sg2") {
    s.dirichlet_eigenvalues = static_cast<std::size_t>(limit.dirichlet.total());
    s.neumann_eigenvalues = static_cast<std::size_t>(limit.neumann.total());
    for (BoundaryCondition bc : {BoundaryCondition::dirichlet, BoundaryCondition::neumann}) {
      CsvTable t(ws.csv_comment(), {"eigenvalue", "multiplicity"});
      const StepFunction& f = limit.get(bc);
      for (std::size_t i = 0; i < f.breakpoints().size(); ++i) t.add_row({f.breakpoints()[i], f.jump(i)});
      t.save(out / ("spectrum_" + to_string(bc) + ".csv"));
    }
  }

  // Weyl dimension over whole periods at the top of the known spectrum.
  const StepFunction& nd = limit.dirichlet;
  const double period = limit.period > 0 ? limit.period : 0.5 * std::log(5.0);
  const double rho = std::exp(2 * period);
  const int periods = std::min(4, static_cast<int>(std::floor(std::log(cap / 10) / std::log(rho))));
  s.periods_fitted = periods;
  if (periods >= 1) {
    const double hi = cap * (1 - 1e-12), lo = hi / std::pow(rho, periods);
    const std::size_t n = 64 * static_cast<std::size_t>(periods);
    std::vector<double> lam(n), cnt(n);
    for (std::size_t i = 0; i < n; ++i) {
      lam[i] = lo * std::pow(rho, periods * static_cast<double>(i) / static_cast<double>(n));
      cnt[i] = nd(lam[i]);
    }
    s.d_s_fit = fit_dimension(lam, cnt);
  }
  if (limit.period > 0) {
    GTable table = extract_G([&](double l) { return limit.neumann(l); }, limit.d_s, limit.period, 1.0,
                             cap * (1 - 1e-12), ws.scenario.folds, 512);
    s.fold_distance = table.fold_distance;
    CsvTable gtab(ws.csv_comment(), {"s", "G"});
    for (std::size_t i = 0; i < table.s.size(); ++i) gtab.add_row({table.s[i], table.g[i]});
    gtab.save(out / "weyl_profile.csv");
  }

  const OperatorInstance op = assemble(ws.graph, CellCoupling::glued, BoundaryCondition::dirichlet, &ws.field);
  if (op.dimension() <= kDefaultDenseCap) {
    Spectrum d = dense_spectrum(op);
    s.dense_dimension = op.dimension();
    CsvTable t(ws.csv_comment(), {"index", "eigenvalue"});
    for (std::size_t i = 0; i < d.eigenvalues.size(); ++i) t.add_row({static_cast<long long>(i), d.eigenvalues[i]});
    t.save(out / "dense_spectrum.csv");
  }
  return s;
}

CountSummary run_count(const Workspace& ws, const fs::path& out) {
  CountSummary s;
  const auto grid = lambda_grid(ws);
  CountingProblem problem(ws.graph, ws.field, level_cell_spectra(ws.complex.tmpl, ws.scenario.level),
                          ws.scenario.direct);
  s.counts = problem.count_grid(grid);
  CsvTable t(ws.csv_comment(), {"lambda", "N_lower", "N_direct", "N_direct_neumann", "N_upper", "rim_certified"});
  std::vector<double> lam, dir;
  for (const auto& c : s.counts) {
    if (c.direct) {
      if (c.lower > *c.direct || *c.direct > c.upper || c.lower > *c.direct_neumann || *c.direct_neumann > c.upper)
        ++s.bracket_violations;
      if (c.rim_certified && *c.direct != *c.direct_neumann) ++s.rim_disagreements;
      lam.push_back(c.lambda);
      dir.push_back(static_cast<double>(*c.direct));
    } else if (c.lower > c.upper) {
      ++s.bracket_violations;
    }
    t.add_row({c.lambda, ll(c.lower), c.direct ? CsvTable::Cell(ll(*c.direct)) : CsvTable::Cell(std::string()),
               c.direct_neumann ? CsvTable::Cell(ll(*c.direct_neumann)) : CsvTable::Cell(std::string()), ll(c.upper),
               static_cast<long long>(c.rim_certified)});
  }
  t.save(out / "counts.csv");
  try {
    s.fit = fit_spectral_dimension(s.counts);
  } catch (const std::invalid_argument&) {
  }
  if (!lam.empty()) {
    try {
      s.direct_fit = fit_dimension(lam, dir);
    } catch (const std::invalid_argument&) {
    }
  }
  return s;
}

BohrSummary run_bohr(const Workspace& ws, const fs::path& out) {
  BohrSummary s;
  s.count = run_count(ws, out);
  const auto grid = lambda_grid(ws);
  const CellSpectra discrete = level_cell_spectra(ws.complex.tmpl, ws.scenario.level);
  const WeylFunction weyl =
      template_weyl(limit_cell_spectra(ws.complex.tmpl, ws.scenario.spectrum_cap), ws.scenario.folds);
  s.bohr = bohr_g(ws.field, ws.graph, weyl, discrete, grid);
  const StepFunction f_exact = distribution(ws.field, ws.graph, DistributionKind::exact);
  s.layercake.assign(grid.size(), 0.0);
  parallel_for(grid.size(), [&](std::size_t i) { s.layercake[i] = bohr_g_layercake(f_exact, weyl, grid[i]); });
  // Below the bottom of the bracketing spectra the bound is undefined: NaN.
  s.bound.assign(grid.size(), kNan);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    try {
      s.bound[i] = bohr_error_bound_at(s.bohr, i);
    } catch (const std::domain_error&) {
    }
  }
  const double ratio = weyl_period_ratio(weyl);
  s.bound_averaged = ratio > 0 ? period_average(grid, s.bound, ratio) : s.bound;
  s.bound_decreasing = nonincreasing_over_top_decade(grid, s.bound_averaged);

  CsvTable t(ws.csv_comment(), {"lambda", "N_lower", "N_upper", "N_direct", "g", "g_sup", "g_inf", "g_layercake",
                                "error_bound", "error_bound_avg", "ratio"});
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const auto& c = s.count.counts[i];
    const double g = s.bohr.g[i];
    s.max_layercake_deviation = std::max(s.max_layercake_deviation, std::abs(s.layercake[i] - g) / g);
    double ratio_i = kNan;
    if (c.direct) {
      ratio_i = static_cast<double>(*c.direct) / g;
      // Bound and ratio come from separate quadratures; allow rounding.
      if (std::isfinite(s.bound[i]) && std::abs(ratio_i - 1) > s.bound[i] + 1e-9) ++s.containment_violations;
    }
    t.add_row({grid[i], ll(c.lower), ll(c.upper), c.direct ? CsvTable::Cell(ll(*c.direct)) : CsvTable::Cell(""), g,
               s.bohr.g_sup[i], s.bohr.g_inf[i], s.layercake[i], s.bound[i], s.bound_averaged[i], ratio_i});
  }
  t.save(out / "bohr.csv");

  const StepFunction f_sup = distribution(ws.field, ws.graph, DistributionKind::sup_envelope);
  const StepFunction f_inf = distribution(ws.field, ws.graph, DistributionKind::inf_envelope);
  WeakBohrReport weak = weak_bohr_check(f_sup, f_inf, grid);
  std::vector<double> stars = weak.lambda_star;
  BohrFunction at_star = bohr_g(ws.field, ws.graph, weyl, discrete, stars);
  CsvTable w(ws.csv_comment(), {"lambda", "lambda_star", "F_inf_over_F_sup_star", "F_sup_over_F_inf_star",
                                "N_direct_over_g_star"});
  for (std::size_t i = 0; i < weak.lambda.size(); ++i) {
    auto it = std::find(grid.begin(), grid.end(), weak.lambda[i]);
    const auto& c = s.count.counts[static_cast<std::size_t>(it - grid.begin())];
    double r = c.direct ? static_cast<double>(*c.direct) / at_star.g[i] : kNan;
    w.add_row({weak.lambda[i], weak.lambda_star[i], weak.inf_over_sup[i], weak.sup_over_inf[i], r});
  }
  w.save(out / "weak_bohr.csv");
  s.weak = std::move(weak);
  return s;
}

TraceSummary run_trace(const Workspace& ws, const fs::path& out) {
  TraceSummary s;
  const auto grid = t_grid(ws);
  const CellSpectra limit = limit_cell_spectra(ws.complex.tmpl, ws.scenario.spectrum_cap);
  s.table = bracketed_trace(ws.graph, ws.field, limit, grid);
  s.factorization = factorization_ratio(s.table);
  s.window = reliable_window(s.table, limit.cap, ws.scenario.rim_tolerance);
  s.contains_one = true;
  bool first = true;
  TraceTable in_window;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (grid[i] < s.window.t_min) continue;
    ++s.window_points;
    // Both factors are sums of positive terms; allow for their rounding.
    if (s.factorization.lower[i] > 1 + 1e-12 || s.factorization.upper[i] < 1 - 1e-12) s.contains_one = false;
    if (first) {
      s.width_at_t_min = s.factorization.upper[i] - s.factorization.lower[i];
      first = false;
    }
    in_window.t.push_back(grid[i]);
    in_window.l_lower.push_back(s.table.l_lower[i]);
    in_window.l_upper.push_back(s.table.l_upper[i]);
  }
  if (s.window_points == 0) s.contains_one = false;
  try {
    s.d_s_fit = fit_spectral_dimension_t(in_window);
  } catch (const std::invalid_argument&) {
  }
  CsvTable t(ws.csv_comment(), {"t", "L_sup", "L_inf", "F_t", "ratio", "ratio_lower", "ratio_upper", "tail_bound",
                                "rim_share", "reliable"});
  for (std::size_t i = 0; i < grid.size(); ++i)
    t.add_row({grid[i], s.table.l_lower[i], s.table.l_upper[i], s.table.f_t[i], s.factorization.ratio[i],
               s.factorization.lower[i], s.factorization.upper[i], s.table.tail_bound[i], s.table.rim_share[i],
               static_cast<long long>(grid[i] >= s.window.t_min)});
  t.save(out / "trace.csv");
  CsvTable win(ws.csv_comment(), {"t_min", "t_max", "t_min_cap", "t_min_rim"});
  win.add_row({s.window.t_min, s.window.t_max, s.window.t_min_cap, s.window.t_min_rim});
  win.save(out / "trace_window.csv");
  return s;
}

ValidateSummary run_validate(const Workspace& ws, const fs::path& out) {
  ValidateSummary s;
  const auto grid = lambda_grid(ws);
  const StepFunction f_sup = distribution(ws.field, ws.graph, DistributionKind::sup_envelope);
  const StepFunction f_inf = distribution(ws.field, ws.graph, DistributionKind::inf_envelope);
  try {
    s.doubling = check_doubling(f_sup, f_inf, grid);
  } catch (const std::invalid_argument&) {
  }
  s.envelope = check_envelope_ratio(f_sup, f_inf, grid);
  if (!ws.distances.values.empty())
    s.growth = check_growth_and_hoelder(ws.field, ws.graph, ws.distances, ws.scenario.potential.beta, 1.0);
  s.harmonic_residual = ws.field.harmonic_residual;

  CsvTable e(ws.csv_comment(), {"lambda", "h"});
  for (std::size_t i = 0; i < s.envelope.lambda.size(); ++i) e.add_row({s.envelope.lambda[i], s.envelope.h[i]});
  e.save(out / "envelope.csv");
  CsvTable v(ws.csv_comment(), {"check", "value", "pass"});
  if (s.doubling) {
    v.add_row({std::string("doubling_c_hat"), s.doubling->c_hat, static_cast<long long>(s.doubling->pass)});
    v.add_row({std::string("doubling_c_lower_half"), s.doubling->c_lower_half, static_cast<long long>(s.doubling->stable)});
    v.add_row({std::string("doubling_c_upper_half"), s.doubling->c_upper_half, static_cast<long long>(s.doubling->stable)});
  }
  v.add_row({std::string("envelope_h_max"), s.envelope.h_max, static_cast<long long>(s.envelope.pass)});
  v.add_row({std::string("envelope_top_decade_slope"), s.envelope.top_decade_slope,
             static_cast<long long>(s.envelope.decreasing)});
  if (!ws.distances.values.empty()) {
    v.add_row({std::string("growth_c3"), s.growth.c3, static_cast<long long>(s.growth.c3 > 0)});
    v.add_row({std::string("growth_c4"), s.growth.c4, static_cast<long long>(std::isfinite(s.growth.c4))});
    v.add_row({std::string("oscillation_c8"), s.growth.c8, static_cast<long long>(std::isfinite(s.growth.c8))});
  }
  if (ws.scenario.potential.kind == PotentialKind::graph_harmonic)
    v.add_row({std::string("harmonic_residual"), s.harmonic_residual, static_cast<long long>(s.harmonic_residual < 1e-8)});
  v.save(out / "validate.csv");
  return s;
}

void run_report(const Workspace& ws, const fs::path& out) {
  BuildSummary b = run_build(ws, out);
  SpectrumSummary sp = run_spectrum(ws, out);
  BohrSummary bo = run_bohr(ws, out);
  ValidateSummary va = run_validate(ws, out);
  std::optional<TraceSummary> tr;
  if (ws.scenario.t.points >= 2) tr = run_trace(ws, out);

  CsvTable s(ws.csv_comment(), {"quantity", "value"});
  auto row = [&](const std::string& k, double v) { s.add_row({k, v}); };
  row("cells", static_cast<double>(b.cells));
  row("vertices", static_cast<double>(b.vertices));
  row("cell_radius", b.cell_radius);
  row("mass_dimension", b.mass_dimension.value_or(kNan));
  row("weyl_dimension_fit", sp.d_s_fit);
  row("fold_distance_top", sp.fold_distance.empty() ? kNan : sp.fold_distance.back());
  row("bracket_violations", static_cast<double>(bo.count.bracket_violations));
  row("rim_disagreements", static_cast<double>(bo.count.rim_disagreements));
  row("spectral_dimension_fit", bo.count.fit ? bo.count.fit->d_s : kNan);
  row("spectral_dimension_direct_fit", bo.count.direct_fit.value_or(kNan));
  row("layercake_max_deviation", bo.max_layercake_deviation);
  row("bohr_containment_violations", static_cast<double>(bo.containment_violations));
  row("bohr_bound_decreasing", bo.bound_decreasing);
  row("weak_bohr_pass", bo.weak && bo.weak->pass);
  row("envelope_h_max", va.envelope.h_max);
  row("envelope_decreasing", va.envelope.decreasing);
  row("doubling_pass", va.doubling && va.doubling->pass);
  if (tr) {
    row("trace_t_min", tr->window.t_min);
    row("trace_contains_one", tr->contains_one);
    row("trace_width_at_t_min", tr->width_at_t_min);
    row("trace_dimension_fit", tr->d_s_fit.value_or(kNan));
  }
  s.save(out / "summary.csv");

  std::string gp =
      "# gnuplot script over the CSV files in this directory\n"
      "set datafile separator ','\n"
      "set logscale xy\n"
      "set key left top\n"
      "set terminal pngcairo size 900,600\n"
      "set output 'counts.png'\n"
      "plot 'bohr.csv' skip 2 using 1:2 with steps title 'N lower', \\\n"
      "     '' skip 2 using 1:4 with steps title 'N direct', \\\n"
      "     '' skip 2 using 1:3 with steps title 'N upper', \\\n"
      "     '' skip 2 using 1:5 with lines title 'g'\n"
      "set output 'bound.png'\n"
      "plot 'bohr.csv' skip 2 using 1:9 with linespoints title 'error bound', \\\n"
      "     '' skip 2 using 1:(abs($11-1)) with linespoints title '|N/g - 1|'\n";
  if (tr)
    gp +=
        "set output 'trace.png'\n"
        "unset logscale y\n"
        "plot 'trace.csv' skip 2 using 1:6 with lines title 'ratio lower', \\\n"
        "     '' skip 2 using 1:7 with lines title 'ratio upper'\n";
  write_text(out / "plot.gp", gp);
}

}  // namespace fracspec
