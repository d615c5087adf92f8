#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "fracspec/potential.hpp"

namespace fracspec {

struct SpaceSpec {
  std::string builder = "blowup";  // blowup | ladder | hexagonal | trifield | interval | cell
  std::string template_name = "sg2";
  std::vector<int> word;
  int generations = 0;
  int length = 0;  // ladder
  int radius = 0;  // hexagonal, trifield
  int cells = 0;   // interval
};

struct GridSpec {
  std::optional<double> min;  // absent: derived (see pipeline)
  std::optional<double> max;
  std::size_t points = 0;
};

// One experiment: space, refinement, potential, grids and tolerances.
struct Scenario {
  std::string name;
  SpaceSpec space;
  int level = 0;
  PotentialSpec potential;
  GridSpec lambda;
  GridSpec t;
  double spectrum_cap = 1e8;  // limit-spectrum cap for W and the trace
  int folds = 4;
  bool direct = true;  // glued-operator counts
  int mass_r_min = 2;  // radius window for the mass-dimension fit
  int mass_r_max = 0;  // 0: a quarter of the cell-graph radius
  double layercake_tolerance = 1e-6;
  double rim_tolerance = 1e-6;
  std::filesystem::path output_dir = "out";

  void validate() const;
  // Canonical key = value text; identical scenarios give identical text.
  std::string canonical() const;
  // FNV-1a 64 of canonical(), as 16 hex digits.
  std::string hash() const;
};

Scenario load_scenario(const std::filesystem::path& path);
Scenario parse_scenario(const std::string& ini_text, const std::string& name = "scenario");

std::uint64_t fnv1a64(const std::string& data);

}  // namespace fracspec
