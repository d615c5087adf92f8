#include "fracspec/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <numeric>
#include <set>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "fracspec/fit.hpp"

namespace fracspec {

namespace {

AffineMap translation(Rational tx, Rational ty) {
  AffineMap m;
  m.t = {tx, ty};
  return m;
}

AffineMap point_reflection(Rational tx, Rational ty) {
  AffineMap m;
  m.a11 = Rational(-1);
  m.a22 = Rational(-1);
  m.t = {tx, ty};
  return m;
}

// Contraction by 1/2 towards p.
AffineMap halving_towards(const Point& p) {
  AffineMap m;
  m.a11 = Rational(1, 2);
  m.a22 = Rational(1, 2);
  m.t = {p.x * Rational(1, 2), p.y * Rational(1, 2)};
  return m;
}

// Fills cell_graph from shared corners and returns, per corner, the cells using it.
std::map<Point, std::vector<std::size_t>> link_cells(CellComplex& c) {
  std::map<Point, std::vector<std::size_t>> users;
  for (std::size_t k = 0; k < c.cell_count(); ++k)
    for (const Point& p : c.corners(k)) users[p].push_back(k);
  std::vector<std::set<std::size_t>> adj(c.cell_count());
  for (const auto& [p, cells] : users)
    for (std::size_t a : cells)
      for (std::size_t b : cells)
        if (a != b) adj[a].insert(b);
  c.cell_graph.assign(c.cell_count(), {});
  for (std::size_t k = 0; k < adj.size(); ++k) c.cell_graph[k].assign(adj[k].begin(), adj[k].end());
  return users;
}

// Rim = corners used by fewer cells than in the untruncated space.
void tag_rim(CellComplex& c, const std::map<Point, std::vector<std::size_t>>& users, std::size_t full_multiplicity) {
  c.truncation_boundary.clear();
  for (const auto& [p, cells] : users)
    if (cells.size() < full_multiplicity && !c.is_physical_point(p)) c.truncation_boundary.push_back(p);
}

std::size_t find_cell(const CellComplex& c, const AffineMap& placement) {
  for (std::size_t k = 0; k < c.cell_count(); ++k)
    if (c.placements[k] == placement) return k;
  throw std::logic_error("placement not present in complex");
}

// Restricts a periodic cell family to the cells within Γ-distance `depth` of `seeds`.
CellComplex restrict_to_ball(CellComplex full, const std::vector<std::size_t>& seeds, int depth,
                             std::size_t full_multiplicity, const Point& origin, std::size_t origin_cell_full) {
  link_cells(full);
  std::vector<int> dist(full.cell_count(), -1);
  std::deque<std::size_t> queue;
  for (std::size_t s : seeds) {
    dist[s] = 0;
    queue.push_back(s);
  }
  while (!queue.empty()) {
    std::size_t a = queue.front();
    queue.pop_front();
    if (dist[a] >= depth) continue;
    for (std::size_t b : full.cell_graph[a])
      if (dist[b] < 0) {
        dist[b] = dist[a] + 1;
        queue.push_back(b);
      }
  }
  CellComplex patch;
  patch.tmpl = full.tmpl;
  patch.builder = full.builder;
  for (std::size_t k = 0; k < full.cell_count(); ++k) {
    if (dist[k] < 0) continue;
    if (k == origin_cell_full) patch.origin_cell = patch.placements.size();
    patch.placements.push_back(full.placements[k]);
  }
  patch.origin = origin;
  auto users = link_cells(patch);
  tag_rim(patch, users, full_multiplicity);
  return patch;
}

}  // namespace

double Template::spectral_dimension() const {
  auto f = [this](double d) {
    double s = 0;
    for (std::size_t i = 0; i < maps.size(); ++i) s += std::pow(measure_weights[i] * resistance_weights[i], d / 2);
    return s - 1.0;
  };
  double lo = 0.0, hi = 1.0;
  while (f(hi) > 0) hi *= 2;
  for (int it = 0; it < 200; ++it) {
    double mid = 0.5 * (lo + hi);
    (f(mid) > 0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

std::array<double, 2> Template::embed(const Point& p) const {
  double x = p.x.to_double(), y = p.y.to_double();
  return {embedding[0] * x + embedding[1] * y, embedding[2] * x + embedding[3] * y};
}

void Template::validate() const {
  if (maps.empty() || boundary.empty()) throw std::invalid_argument("template without maps or boundary");
  if (measure_weights.size() != maps.size() || resistance_weights.size() != maps.size())
    throw std::invalid_argument("template weight count differs from map count");
  double total = 0;
  for (std::size_t i = 0; i < maps.size(); ++i) {
    double mu = measure_weights[i], r = resistance_weights[i];
    if (!(mu > 0 && mu < 1) || !(r > 0 && r < 1)) throw std::invalid_argument("template weights outside (0,1)");
    if (!(mu * r < 1)) throw std::invalid_argument("template requires mu_i * r_i < 1");
    total += mu;
  }
  if (std::abs(total - 1.0) > 1e-12) throw std::invalid_argument("measure weights do not sum to 1");
  for (const Point& p : boundary) {
    bool fixed = std::any_of(maps.begin(), maps.end(), [&](const AffineMap& m) { return m.apply(p) == p; });
    if (!fixed) throw std::invalid_argument("boundary vertex is not a fixed point of any contraction");
  }
}

Template build_sg2_template() {
  Template t;
  t.name = "sg2";
  t.boundary = {{Rational(0), Rational(0)}, {Rational(1), Rational(0)}, {Rational(0), Rational(1)}};
  for (const Point& p : t.boundary) t.maps.push_back(halving_towards(p));
  t.measure_weights = {1.0 / 3, 1.0 / 3, 1.0 / 3};
  t.resistance_weights = {0.6, 0.6, 0.6};
  t.base_edges = {{0, 1}, {1, 2}, {0, 2}};
  t.embedding = {1.0, 0.5, 0.0, std::sqrt(3.0) / 2};
  t.diameter = 1.0;
  t.spectral_dimension_hint = 2 * std::log(3.0) / std::log(5.0);
  return t;
}

Template build_interval_template() {
  Template t;
  t.name = "interval";
  t.boundary = {{Rational(0), Rational(0)}, {Rational(1), Rational(0)}};
  for (const Point& p : t.boundary) t.maps.push_back(halving_towards(p));
  t.measure_weights = {0.5, 0.5};
  t.resistance_weights = {0.5, 0.5};
  t.base_edges = {{0, 1}};
  t.diameter = 1.0;
  t.spectral_dimension_hint = 1.0;
  return t;
}

Template template_by_name(const std::string& name) {
  if (name == "sg2") return build_sg2_template();
  if (name == "interval") return build_interval_template();
  throw std::invalid_argument("unknown template '" + name + "'");
}

std::vector<Point> CellComplex::corners(std::size_t cell) const {
  std::vector<Point> out;
  out.reserve(tmpl.boundary.size());
  for (const Point& p : tmpl.boundary) out.push_back(placements.at(cell).apply(p));
  return out;
}

std::size_t CellComplex::identifications() const {
  std::set<Point> distinct;
  std::size_t total = 0;
  for (std::size_t k = 0; k < cell_count(); ++k)
    for (const Point& p : corners(k)) {
      distinct.insert(p);
      ++total;
    }
  return total - distinct.size();
}

std::vector<int> CellComplex::hop_distances(std::size_t center) const {
  if (center >= cell_count()) throw std::out_of_range("invalid center cell");
  std::vector<int> dist(cell_count(), -1);
  std::deque<std::size_t> queue{center};
  dist[center] = 0;
  while (!queue.empty()) {
    std::size_t a = queue.front();
    queue.pop_front();
    for (std::size_t b : cell_graph[a])
      if (dist[b] < 0) {
        dist[b] = dist[a] + 1;
        queue.push_back(b);
      }
  }
  return dist;
}

bool CellComplex::is_truncation_point(const Point& p) const {
  return std::binary_search(truncation_boundary.begin(), truncation_boundary.end(), p);
}

bool CellComplex::is_physical_point(const Point& p) const {
  return std::binary_search(physical_boundary.begin(), physical_boundary.end(), p);
}

CellComplex build_blowup(const Template& tmpl, const std::vector<int>& word, int generations) {
  if (generations < 0) throw std::invalid_argument("negative generation count");
  if (static_cast<int>(word.size()) < generations)
    throw std::invalid_argument("word shorter than requested generations");
  const int n_maps = static_cast<int>(tmpl.maps.size());
  for (int i = 0; i < generations; ++i)
    if (word[i] < 1 || word[i] > n_maps) throw std::invalid_argument("word letter outside map range");

  CellComplex c;
  c.tmpl = tmpl;
  c.builder = "blowup";
  c.word = word;
  c.generations = generations;
  AffineMap phi = AffineMap::identity();
  for (int i = 0; i < generations; ++i) phi = phi.compose(tmpl.maps[word[i] - 1].inverse());

  std::vector<AffineMap> level{phi};
  for (int g = 0; g < generations; ++g) {
    std::vector<AffineMap> next;
    next.reserve(level.size() * tmpl.maps.size());
    for (const AffineMap& a : level)
      for (const AffineMap& m : tmpl.maps) next.push_back(a.compose(m));
    level = std::move(next);
  }
  c.placements = std::move(level);

  int first = word.empty() ? 1 : word[0];
  c.origin = tmpl.boundary.at(first - 1);
  c.origin_cell = find_cell(c, AffineMap::identity());
  auto users = link_cells(c);
  (void)users;
  for (const Point& p : tmpl.boundary) c.truncation_boundary.push_back(phi.apply(p));
  std::sort(c.truncation_boundary.begin(), c.truncation_boundary.end());

  if (generations >= 2) {
    int half = generations / 2;
    bool constant_tail = std::all_of(word.begin() + half, word.begin() + generations,
                                     [&](int l) { return l == word[generations - 1]; });
    if (constant_tail)
      c.warnings.push_back("blow-up word looks eventually constant; the origin sits near the rim");
  }
  if (c.is_truncation_point(c.origin)) c.warnings.push_back("origin lies on the truncation rim");
  return c;
}

CellComplex build_ladder(const Template& tmpl, int length) {
  if (length < 1) throw std::invalid_argument("ladder length must be at least 1");
  CellComplex c;
  c.tmpl = tmpl;
  c.builder = "ladder";
  for (int i = 0; i < length; ++i) {
    c.placements.push_back(translation(Rational(i), Rational(0)));
    c.placements.push_back(point_reflection(Rational(i), Rational(2)));
  }
  int mid = length / 2;
  c.origin = {Rational(mid), Rational(1)};
  c.origin_cell = 2 * static_cast<std::size_t>(mid);
  auto users = link_cells(c);
  tag_rim(c, users, 2);
  return c;
}

CellComplex build_hexagonal(const Template& tmpl, int radius) {
  if (radius < 1) throw std::invalid_argument("hexagonal radius must be at least 1");
  CellComplex full;
  full.tmpl = tmpl;
  full.builder = "hexagonal";
  const int box = radius + 3;
  for (int i = -box; i <= box; ++i)
    for (int j = -box; j <= box; ++j) {
      full.placements.push_back(translation(Rational(2 * i), Rational(2 * j)));
      full.placements.push_back(point_reflection(Rational(2 * i + 2), Rational(2 * j)));
    }
  // Hexagonal hole centred at lattice point (1,1); its ring consists of the cells
  // having two corners among the six surrounding lattice points.
  const std::set<Point> hexagon = {
      {Rational(2), Rational(1)}, {Rational(0), Rational(1)}, {Rational(1), Rational(2)},
      {Rational(1), Rational(0)}, {Rational(2), Rational(0)}, {Rational(0), Rational(2)}};
  std::vector<std::size_t> ring;
  for (std::size_t k = 0; k < full.cell_count(); ++k) {
    auto cs = full.corners(k);
    auto hits = std::count_if(cs.begin(), cs.end(), [&](const Point& p) { return hexagon.count(p) > 0; });
    if (hits >= 2) ring.push_back(k);
  }
  std::size_t origin_cell = find_cell(full, translation(Rational(0), Rational(0)));
  return restrict_to_ball(std::move(full), ring, radius - 1, 2, {Rational(1), Rational(0)}, origin_cell);
}

CellComplex build_trifield(const Template& tmpl, int radius) {
  if (radius < 1) throw std::invalid_argument("trifield radius must be at least 1");
  CellComplex full;
  full.tmpl = tmpl;
  full.builder = "trifield";
  const int box = radius + 2;
  for (int i = -box; i <= box; ++i)
    for (int j = -box; j <= box; ++j) full.placements.push_back(translation(Rational(i), Rational(j)));
  std::size_t center = find_cell(full, translation(Rational(0), Rational(0)));
  return restrict_to_ball(std::move(full), {center}, radius, 3, {Rational(0), Rational(0)}, center);
}

CellComplex build_interval_lattice(int cells) {
  if (cells < 1) throw std::invalid_argument("interval lattice needs at least one cell");
  CellComplex c;
  c.tmpl = build_interval_template();
  c.builder = "interval";
  for (int k = 0; k < cells; ++k) c.placements.push_back(translation(Rational(k), Rational(0)));
  c.origin = {Rational(0), Rational(0)};
  c.origin_cell = 0;
  c.physical_boundary = {c.origin};
  auto users = link_cells(c);
  tag_rim(c, users, 2);
  return c;
}

std::size_t cell_graph_ball(const CellComplex& complex, std::size_t center, int r) {
  if (r < 0) throw std::invalid_argument("negative ball radius");
  auto dist = complex.hop_distances(center);
  return static_cast<std::size_t>(std::count_if(dist.begin(), dist.end(), [r](int d) { return d >= 0 && d <= r; }));
}

double estimate_mass_dimension(const CellComplex& complex, std::size_t center, int r_min, int r_max) {
  if (r_min < 1 || r_min >= r_max) throw std::invalid_argument("degenerate radius range");
  auto dist = complex.hop_distances(center);
  int eccentricity = *std::max_element(dist.begin(), dist.end());
  if (r_max > eccentricity) throw std::invalid_argument("radius range exceeds complex radius");
  std::vector<double> xs, ys;
  for (int r = r_min; r <= r_max; ++r) {
    auto n = std::count_if(dist.begin(), dist.end(), [r](int d) { return d >= 0 && d <= r; });
    xs.push_back(std::log(static_cast<double>(r)));
    ys.push_back(std::log(static_cast<double>(n)));
  }
  return fit_line(xs, ys).slope;
}

namespace {

nlohmann::json point_json(const Point& p) { return {p.x.to_string(), p.y.to_string()}; }

Point point_from(const nlohmann::json& j) {
  return {Rational::parse(j.at(0).get<std::string>()), Rational::parse(j.at(1).get<std::string>())};
}

}  // namespace

std::string complex_to_json(const CellComplex& c) {
  nlohmann::json j;
  j["format_version"] = 1;
  j["template"] = c.tmpl.name;
  j["builder"] = c.builder;
  j["origin"] = point_json(c.origin);
  j["origin_cell"] = c.origin_cell;
  if (c.builder == "blowup") {
    j["word"] = c.word;
    j["generations"] = c.generations;
  }
  auto& cells = j["cells"] = nlohmann::json::array();
  for (std::size_t k = 0; k < c.cell_count(); ++k) {
    const AffineMap& m = c.placements[k];
    cells.push_back({{"id", k},
                     {"matrix", {m.a11.to_string(), m.a12.to_string(), m.a21.to_string(), m.a22.to_string()}},
                     {"translation", point_json(m.t)}});
  }
  std::map<Point, std::vector<std::size_t>> users;
  for (std::size_t k = 0; k < c.cell_count(); ++k)
    for (const Point& p : c.corners(k)) users[p].push_back(k);
  auto& ids = j["identifications"] = nlohmann::json::array();
  for (const auto& [p, cs] : users)
    if (cs.size() > 1) ids.push_back({{"point", point_json(p)}, {"cells", cs}});
  auto& rim = j["truncation_boundary"] = nlohmann::json::array();
  for (const Point& p : c.truncation_boundary) rim.push_back(point_json(p));
  auto& phys = j["physical_boundary"] = nlohmann::json::array();
  for (const Point& p : c.physical_boundary) phys.push_back(point_json(p));
  return j.dump(1);
}

CellComplex complex_from_json(const std::string& text) {
  auto j = nlohmann::json::parse(text);
  if (j.at("format_version").get<int>() != 1) throw std::invalid_argument("unsupported complex format version");
  CellComplex c;
  c.tmpl = template_by_name(j.at("template").get<std::string>());
  c.builder = j.at("builder").get<std::string>();
  c.origin = point_from(j.at("origin"));
  c.origin_cell = j.at("origin_cell").get<std::size_t>();
  if (j.contains("word")) {
    c.word = j.at("word").get<std::vector<int>>();
    c.generations = j.at("generations").get<int>();
  }
  for (const auto& cell : j.at("cells")) {
    const auto& mat = cell.at("matrix");
    AffineMap m;
    m.a11 = Rational::parse(mat.at(0).get<std::string>());
    m.a12 = Rational::parse(mat.at(1).get<std::string>());
    m.a21 = Rational::parse(mat.at(2).get<std::string>());
    m.a22 = Rational::parse(mat.at(3).get<std::string>());
    m.t = point_from(cell.at("translation"));
    c.placements.push_back(m);
  }
  for (const auto& p : j.at("truncation_boundary")) c.truncation_boundary.push_back(point_from(p));
  for (const auto& p : j.at("physical_boundary")) c.physical_boundary.push_back(point_from(p));
  link_cells(c);
  return c;
}

bool cells_meet_only_at_corners(const CellComplex& complex) {
  // Level-2 vertex sets of every cell; a point in two cells must be a corner of both.
  const Template& t = complex.tmpl;
  std::vector<AffineMap> words{AffineMap::identity()};
  for (int g = 0; g < 2; ++g) {
    std::vector<AffineMap> next;
    for (const AffineMap& a : words)
      for (const AffineMap& m : t.maps) next.push_back(a.compose(m));
    words = std::move(next);
  }
  std::set<Point> local;
  for (const AffineMap& w : words)
    for (const Point& p : t.boundary) local.insert(w.apply(p));
  std::set<Point> corner_set(t.boundary.begin(), t.boundary.end());

  std::unordered_map<Point, std::pair<std::size_t, bool>, PointHash> seen;
  for (std::size_t k = 0; k < complex.cell_count(); ++k) {
    for (const Point& q : local) {
      Point p = complex.placements[k].apply(q);
      bool is_corner = corner_set.count(q) > 0;
      auto [it, fresh] = seen.emplace(p, std::make_pair(k, is_corner));
      if (!fresh && !(it->second.second && is_corner)) return false;
    }
  }
  return true;
}

}  // namespace fracspec
