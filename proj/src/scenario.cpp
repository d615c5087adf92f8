#include "fracspec/scenario.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "fracspec/csv.hpp"

namespace fracspec {

namespace {

namespace pt = boost::property_tree;

std::vector<int> parse_word(const std::string& text) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t b = item.find_first_not_of(" \t"), e = item.find_last_not_of(" \t");
    if (b == std::string::npos) continue;
    out.push_back(std::stoi(item.substr(b, e - b + 1)));
  }
  return out;
}

std::optional<double> optional_number(const pt::ptree& tree, const std::string& key) {
  auto v = tree.get_optional<std::string>(key);
  if (!v || *v == "auto" || v->empty()) return std::nullopt;
  return std::stod(*v);
}

std::string opt_text(const std::optional<double>& v) { return v ? format_double(*v) : "auto"; }

}  // namespace

void Scenario::validate() const {
  static const char* builders[] = {"blowup", "ladder", "hexagonal", "trifield", "interval", "cell"};
  bool known = false;
  for (const char* b : builders) known = known || space.builder == b;
  if (!known) throw std::invalid_argument("unknown builder '" + space.builder + "'");
  if (space.builder == "blowup" && space.generations < 0) throw std::invalid_argument("generations must be >= 0");
  if (space.builder == "ladder" && space.length < 2) throw std::invalid_argument("ladder length must be >= 2");
  if ((space.builder == "hexagonal" || space.builder == "trifield") && space.radius < 1)
    throw std::invalid_argument("radius must be >= 1");
  if (space.builder == "interval" && space.cells < 1) throw std::invalid_argument("interval needs cells >= 1");
  if (level < 0) throw std::invalid_argument("refinement level must be >= 0");
  potential.validate();
  for (const GridSpec* g : {&lambda, &t}) {
    if (g->points == 1) throw std::invalid_argument("a grid needs at least two points");
    if (g->min && !(*g->min > 0)) throw std::invalid_argument("grid minimum must be positive");
    if (g->min && g->max && !(*g->max > *g->min)) throw std::invalid_argument("grid maximum must exceed minimum");
  }
  if (!(spectrum_cap > 0) || folds < 1) throw std::invalid_argument("invalid spectrum section");
  if (!(layercake_tolerance > 0) || !(rim_tolerance > 0)) throw std::invalid_argument("tolerances must be positive");
  if (mass_r_min < 1 || mass_r_max < 0) throw std::invalid_argument("invalid mass-dimension window");
}

std::string Scenario::canonical() const {
  std::ostringstream o;
  std::string word_text;
  for (std::size_t i = 0; i < space.word.size(); ++i) word_text += (i ? "," : "") + std::to_string(space.word[i]);
  o << "space.builder=" << space.builder << "\nspace.template=" << space.template_name << "\nspace.word=" << word_text
    << "\nspace.generations=" << space.generations << "\nspace.length=" << space.length
    << "\nspace.radius=" << space.radius << "\nspace.cells=" << space.cells << "\nrefine.level=" << level
    << "\npotential.kind=" << to_string(potential.kind) << "\npotential.metric=" << to_string(potential.metric)
    << "\npotential.c=" << format_double(potential.c) << "\npotential.beta=" << format_double(potential.beta)
    << "\npotential.padding=" << potential.harmonic_padding << "\nlambda.min=" << opt_text(lambda.min)
    << "\nlambda.max=" << opt_text(lambda.max) << "\nlambda.points=" << lambda.points << "\nt.min=" << opt_text(t.min)
    << "\nt.max=" << opt_text(t.max) << "\nt.points=" << t.points << "\nspectrum.cap=" << format_double(spectrum_cap)
    << "\nspectrum.folds=" << folds << "\ncount.direct=" << direct << "\nfit.mass_r_min=" << mass_r_min
    << "\nfit.mass_r_max=" << mass_r_max << "\ntolerance.layercake=" << format_double(layercake_tolerance)
    << "\ntolerance.rim=" << format_double(rim_tolerance) << "\n";
  return o.str();
}

std::uint64_t fnv1a64(const std::string& data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string Scenario::hash() const {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(canonical())));
  return buf;
}

Scenario parse_scenario(const std::string& ini_text, const std::string& name) {
  pt::ptree tree;
  std::istringstream in(ini_text);
  pt::read_ini(in, tree);
  Scenario s;
  s.name = name;
  s.space.builder = tree.get<std::string>("space.builder", s.space.builder);
  s.space.template_name = tree.get<std::string>("space.template", s.space.template_name);
  s.space.word = parse_word(tree.get<std::string>("space.word", ""));
  s.space.generations = tree.get<int>("space.generations", 0);
  s.space.length = tree.get<int>("space.length", 0);
  s.space.radius = tree.get<int>("space.radius", 0);
  s.space.cells = tree.get<int>("space.cells", 0);
  s.level = tree.get<int>("refine.level", 0);
  s.potential.kind = potential_kind_from_string(tree.get<std::string>("potential.kind", "power_distance"));
  s.potential.metric = metric_from_string(tree.get<std::string>("potential.metric", "cell_graph_scaled"));
  s.potential.c = tree.get<double>("potential.c", 1.0);
  s.potential.beta = tree.get<double>("potential.beta", 2.0);
  s.potential.harmonic_padding = tree.get<int>("potential.padding", 0);
  s.lambda.min = optional_number(tree, "lambda.min");
  s.lambda.max = optional_number(tree, "lambda.max");
  s.lambda.points = tree.get<std::size_t>("lambda.points", 20);
  s.t.min = optional_number(tree, "t.min");
  s.t.max = optional_number(tree, "t.max");
  s.t.points = tree.get<std::size_t>("t.points", 0);
  s.spectrum_cap = tree.get<double>("spectrum.cap", s.spectrum_cap);
  s.folds = tree.get<int>("spectrum.folds", s.folds);
  s.direct = tree.get<bool>("count.direct", true);
  s.mass_r_min = tree.get<int>("fit.mass_r_min", s.mass_r_min);
  s.mass_r_max = tree.get<int>("fit.mass_r_max", s.mass_r_max);
  s.layercake_tolerance = tree.get<double>("tolerance.layercake", s.layercake_tolerance);
  s.rim_tolerance = tree.get<double>("tolerance.rim", s.rim_tolerance);
  s.output_dir = tree.get<std::string>("output.dir", s.output_dir.string());
  s.validate();
  return s;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open scenario " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str(), path.stem().string());
}

}  // namespace fracspec
