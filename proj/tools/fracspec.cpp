#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "fracspec/csv.hpp"
#include "fracspec/decimation.hpp"
#include "fracspec/parallel.hpp"
#include "fracspec/pipeline.hpp"
#include "fracspec/scenario.hpp"

namespace {

struct Options {
  std::string config;
  std::string out;
  unsigned threads = 0;
  std::optional<double> lambda_max;
  std::optional<int> level;
};

std::optional<std::string> env(const char* name) {
  const char* v = std::getenv(name);
  if (!v || !*v) return std::nullopt;
  return std::string(v);
}

fracspec::Workspace load(const Options& o, std::filesystem::path& out_dir) {
  fracspec::Scenario s = fracspec::load_scenario(o.config);
  if (o.lambda_max) s.lambda.max = *o.lambda_max;
  if (o.level) s.level = *o.level;
  s.validate();
  out_dir = s.output_dir;
  if (auto e = env("FRACSPEC_OUT")) out_dir = *e;
  if (!o.out.empty()) out_dir = o.out;
  return fracspec::prepare(s);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spectral asymptotics of Schrödinger operators on fractal blow-ups"};
  app.require_subcommand(1);
  Options opt;
  app.set_version_flag("--version", std::string(fracspec::kToolVersion));

  const char* names[][2] = {{"build", "Build the cell complex and graph; dump geometry"},
                            {"spectrum", "Single-cell spectra by decimation or analytically, Weyl profile"},
                            {"count", "Bracketed and direct eigenvalue counts on the λ grid"},
                            {"bohr", "Bohr function, error bound, layer-cake check, weak-Bohr tables"},
                            {"trace", "Heat-trace bracket and factorization ratio on the t grid"},
                            {"validate", "Potential checks: doubling, envelope ratio, growth"},
                            {"report", "Run everything and write summary.csv and plot.gp"}};
  std::string chosen;
  for (auto& n : names) {
    CLI::App* sub = app.add_subcommand(n[0], n[1]);
    sub->add_option("--config", opt.config, "Scenario file (INI)")->required();
    sub->add_option("--out", opt.out, "Output directory (overrides FRACSPEC_OUT and the scenario)");
    sub->add_option("--threads", opt.threads, "Worker threads (overrides FRACSPEC_THREADS; 0 = all cores)");
    sub->add_option("--lambda-max", opt.lambda_max, "Top of the λ grid");
    sub->add_option("--level", opt.level, "Refinement level m")->check(CLI::NonNegativeNumber);
    sub->callback([&chosen, name = std::string(n[0])] { chosen = name; });
  }
  CLI11_PARSE(app, argc, argv);

  try {
    unsigned threads = opt.threads;
    if (threads == 0)
      if (auto e = env("FRACSPEC_THREADS")) threads = static_cast<unsigned>(std::stoul(*e));
    fracspec::set_thread_count(threads);

    std::filesystem::path out;
    const fracspec::Workspace ws = load(opt, out);
    if (chosen == "build") {
      auto s = fracspec::run_build(ws, out);
      std::cout << "cells " << s.cells << ", vertices " << s.vertices << ", cell radius " << s.cell_radius << "\n";
    } else if (chosen == "spectrum") {
      auto s = fracspec::run_spectrum(ws, out);
      std::cout << "Dirichlet " << s.dirichlet_eigenvalues << ", Neumann " << s.neumann_eigenvalues
                << " eigenvalues; Weyl dimension fit " << s.d_s_fit << "\n";
    } else if (chosen == "count") {
      auto s = fracspec::run_count(ws, out);
      std::cout << s.counts.size() << " λ values, " << s.bracket_violations << " bracket violations\n";
      if (s.bracket_violations) return 3;
    } else if (chosen == "bohr") {
      auto s = fracspec::run_bohr(ws, out);
      std::cout << "final N/g " << (s.count.counts.back().direct ? *s.count.counts.back().direct / s.bohr.g.back() : 0.0)
                << ", bound " << s.bound.back() << ", layer-cake deviation " << s.max_layercake_deviation << "\n";
    } else if (chosen == "trace") {
      auto s = fracspec::run_trace(ws, out);
      std::cout << "reliable t from " << s.window.t_min << ", width there " << s.width_at_t_min << "\n";
    } else if (chosen == "validate") {
      auto s = fracspec::run_validate(ws, out);
      std::cout << "envelope h_max " << s.envelope.h_max << (s.envelope.pass ? " (pass)" : " (fail)") << "\n";
    } else {
      fracspec::run_report(ws, out);
      std::cout << "report written to " << out << "\n";
    }
  } catch (const fracspec::ValidationFailure& e) {
    std::cerr << "validation gate failed: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
