#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <set>
#include <stdexcept>

#include "fracspec/geometry.hpp"

using namespace fracspec;

namespace {

// Adjacency rebuilt from scratch by comparing every pair of cells' corners.
std::vector<std::vector<std::size_t>> brute_force_adjacency(const CellComplex& c) {
  std::vector<std::vector<std::size_t>> adj(c.cell_count());
  for (std::size_t a = 0; a < c.cell_count(); ++a)
    for (std::size_t b = a + 1; b < c.cell_count(); ++b) {
      bool shared = false;
      for (const Point& p : c.corners(a))
        for (const Point& q : c.corners(b)) shared = shared || p == q;
      if (shared) {
        adj[a].push_back(b);
        adj[b].push_back(a);
      }
    }
  return adj;
}

std::size_t bfs_ball(const std::vector<std::vector<std::size_t>>& adj, std::size_t center, int r) {
  std::vector<int> dist(adj.size(), -1);
  std::deque<std::size_t> q{center};
  dist[center] = 0;
  while (!q.empty()) {
    auto u = q.front();
    q.pop_front();
    for (auto v : adj[u])
      if (dist[v] < 0) {
        dist[v] = dist[u] + 1;
        q.push_back(v);
      }
  }
  return std::count_if(dist.begin(), dist.end(), [r](int d) { return d >= 0 && d <= r; });
}

std::size_t pairwise_identifications(const CellComplex& c) {
  std::vector<Point> all;
  for (std::size_t k = 0; k < c.cell_count(); ++k)
    for (const Point& p : c.corners(k)) all.push_back(p);
  // Every corner beyond the first copy of its coordinate is one identification.
  std::size_t dup = 0;
  for (std::size_t i = 0; i < all.size(); ++i) {
    bool seen = false;
    for (std::size_t j = 0; j < i && !seen; ++j) seen = all[j] == all[i];
    dup += seen;
  }
  return dup;
}

std::vector<std::vector<std::size_t>> sorted(std::vector<std::vector<std::size_t>> adj) {
  for (auto& n : adj) std::sort(n.begin(), n.end());
  return adj;
}

bool connected(const CellComplex& c) { return bfs_ball(c.cell_graph, 0, static_cast<int>(c.cell_count())) == c.cell_count(); }

}  // namespace

TEST_CASE("SG(2) template") {
  Template t = build_sg2_template();
  CHECK_NOTHROW(t.validate());
  CHECK(t.boundary_vertex_count() == 3);
  CHECK(t.maps.size() == 3);
  CHECK(t.spectral_dimension() == doctest::Approx(2 * std::log(3.0) / std::log(5.0)).epsilon(1e-10));
  for (std::size_t i = 0; i < 3; ++i) CHECK(t.maps[i].apply(t.boundary[i]) == t.boundary[i]);
  // Measure of a word cell is the product of its letters' weights.
  double mu = 1;
  for (int n = 0; n < 5; ++n) mu *= t.measure_weights[n % 3];
  CHECK(mu == doctest::Approx(std::pow(3.0, -5)));
}

TEST_CASE("template validation rejects broken weights") {
  Template t = build_sg2_template();
  t.measure_weights = {0.5, 0.5, 0.5};
  CHECK_THROWS_AS(t.validate(), std::invalid_argument);
  t = build_sg2_template();
  t.resistance_weights = {1.2, 0.6, 0.6};
  CHECK_THROWS_AS(t.validate(), std::invalid_argument);
}

TEST_CASE("blow-up cell counts and identifications") {
  Template t = build_sg2_template();
  std::vector<int> word{1, 2, 3, 1, 2, 3, 1, 2};
  auto zero = build_blowup(t, word, 0);
  CHECK(zero.cell_count() == 1);
  CHECK(zero.identifications() == 0);
  auto two = build_blowup(t, word, 2);
  CHECK(two.cell_count() == 9);
  CHECK(two.cell_graph.size() == 9);
  for (int g = 1; g <= 5; ++g) {
    auto c = build_blowup(t, word, g);
    CHECK(c.cell_count() == static_cast<std::size_t>(std::pow(3, g)));
    CHECK(connected(c));
    CHECK(cells_meet_only_at_corners(c));
  }
  auto three = build_blowup(t, word, 3);
  CHECK(three.identifications() == pairwise_identifications(three));
  CHECK(sorted(three.cell_graph) == brute_force_adjacency(three));
  CHECK_THROWS(build_blowup(t, {1, 2}, 3));
}

TEST_CASE("blow-up origin is the image of the first letter's fixed point") {
  Template t = build_sg2_template();
  for (int first : {1, 2, 3}) {
    auto c = build_blowup(t, {first, 1, 2, 3, 1}, 3);
    bool found = false;
    for (std::size_t k = 0; k < c.cell_count(); ++k)
      for (const Point& p : c.corners(k)) found = found || p == c.origin;
    CHECK(found);
  }
}

TEST_CASE("ladder") {
  Template t = build_sg2_template();
  auto one = build_ladder(t, 1);
  CHECK(one.cell_count() == 2);
  std::size_t edges = 0;
  for (const auto& n : one.cell_graph) edges += n.size();
  CHECK(edges / 2 == 1);
  CHECK(build_ladder(t, 10).cell_count() == 20);

  auto fifty = build_ladder(t, 50);
  CHECK(cells_meet_only_at_corners(fifty));
  CHECK(sorted(fifty.cell_graph) == brute_force_adjacency(fifty));
  auto adj = brute_force_adjacency(fifty);
  for (int r = 0; r <= 25; ++r)
    CHECK(cell_graph_ball(fifty, fifty.origin_cell, r) == bfs_ball(adj, fifty.origin_cell, r));
  for (int r = 2; r <= 20; ++r) {
    double ratio = static_cast<double>(cell_graph_ball(fifty, fifty.origin_cell, r)) / r;
    CHECK(ratio >= 1.0);
    CHECK(ratio <= 6.0);
  }
  CHECK(estimate_mass_dimension(fifty, fifty.origin_cell, 2, 20) == doctest::Approx(1.0).epsilon(0.1));
}

TEST_CASE("hexagonal field") {
  Template t = build_sg2_template();
  auto ring = build_hexagonal(t, 1);
  CHECK(ring.cell_count() >= 6);
  CHECK(cells_meet_only_at_corners(ring));
  CHECK(connected(ring));

  auto two = build_hexagonal(t, 2);
  CHECK(sorted(two.cell_graph) == brute_force_adjacency(two));
  // Degree equals the number of other cells touching one of its corners.
  for (std::size_t k = 0; k < two.cell_count(); ++k) {
    std::set<std::size_t> touching;
    for (const Point& p : two.corners(k))
      for (std::size_t j = 0; j < two.cell_count(); ++j)
        if (j != k)
          for (const Point& q : two.corners(j))
            if (p == q) touching.insert(j);
    CHECK(two.cell_graph[k].size() == touching.size());
  }

  auto eight = build_hexagonal(t, 8);
  std::size_t prev = 0;
  for (int r = 0; r <= 16; ++r) {
    auto b = cell_graph_ball(eight, eight.origin_cell, r);
    CHECK(b >= prev);
    CHECK(b <= eight.cell_count());
    prev = b;
  }
  CHECK(estimate_mass_dimension(eight, eight.origin_cell, 2, 8) == doctest::Approx(2.0).epsilon(0.1));
}

TEST_CASE("triangular-lattice field") {
  Template t = build_sg2_template();
  auto one = build_trifield(t, 1);
  CHECK(cells_meet_only_at_corners(one));
  for (std::size_t a = 0; a < one.cell_count(); ++a)
    for (auto b : one.cell_graph[a]) {
      int shared = 0;
      for (const Point& p : one.corners(a))
        for (const Point& q : one.corners(b)) shared += p == q;
      CHECK(shared == 1);
    }
  auto two = build_trifield(t, 2);
  std::set<Point> distinct;
  std::size_t per_cell = 0;
  for (std::size_t k = 0; k < two.cell_count(); ++k)
    for (const Point& p : two.corners(k)) {
      distinct.insert(p);
      ++per_cell;
    }
  CHECK(distinct.size() == per_cell - two.identifications());
  auto eight = build_trifield(t, 8);
  CHECK(estimate_mass_dimension(eight, eight.origin_cell, 2, 8) == doctest::Approx(2.0).epsilon(0.1));
}

TEST_CASE("interval lattice") {
  auto one = build_interval_lattice(1);
  CHECK(one.cell_count() == 1);
  CHECK(one.tmpl.boundary_vertex_count() == 2);
  auto ten = build_interval_lattice(10);
  CHECK(ten.cell_count() == 10);
  CHECK(ten.identifications() == 9);
  CHECK(ten.origin == Point{Rational(0), Rational(0)});
  auto hundred = build_interval_lattice(100);
  CHECK(estimate_mass_dimension(hundred, 0, 2, 50) == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("ball queries") {
  auto c = build_hexagonal(build_sg2_template(), 3);
  CHECK(cell_graph_ball(c, 0, 0) == 1);
  CHECK_THROWS(cell_graph_ball(c, c.cell_count(), 1));
  CHECK_THROWS(estimate_mass_dimension(c, 0, 3, 3));
}

TEST_CASE("construction is deterministic and survives a JSON round trip") {
  Template t = build_sg2_template();
  auto a = build_blowup(t, {1, 2, 3, 2, 1, 3}, 4);
  auto b = build_blowup(t, {1, 2, 3, 2, 1, 3}, 4);
  CHECK(complex_to_json(a) == complex_to_json(b));
  auto back = complex_from_json(complex_to_json(a));
  CHECK(back.placements == a.placements);
  CHECK(back.cell_graph == a.cell_graph);
  CHECK(back.origin == a.origin);
  CHECK(back.truncation_boundary == a.truncation_boundary);
  CHECK(complex_to_json(back) == complex_to_json(a));
}
