#include <doctest.h>

#include <cmath>
#include <set>

#include "klmdp/world.hpp"
#include "oracles.hpp"

using namespace klmdp;

namespace {

std::size_t parse_error_line(std::string_view text) {
  try {
    load_graph(text);
  } catch (const ParseError& e) {
    return e.line();
  }
  FAIL("expected ParseError");
  return 0;
}

}  // namespace

TEST_CASE("load graph") {
  const Graph path = load_graph("0 1\n1 2");
  CHECK(path.size() == 3);
  CHECK(path.edges().size() == 2);
  CHECK(path.neighbors(1) == std::vector<Vertex>{0, 2});

  const Graph commented = load_graph("# terrain\n\n0 1   # trailing\n  1\t2\n");
  CHECK(commented.size() == 3);

  CHECK_THROWS_AS(load_graph(""), ParseError);
  CHECK_THROWS_AS(load_graph("# only a comment\n"), ParseError);
  CHECK_THROWS_AS(load_graph("0 1\n2 3\n"), ParseError);
  CHECK(parse_error_line("0 1\n1 x\n") == 2);
  CHECK(parse_error_line("0 1\n1 2 3\n") == 2);
  CHECK(parse_error_line("0 1\n\n1 1\n") == 3);
  CHECK(parse_error_line("0 1\n1 2\n1 0\n") == 3);
  CHECK(parse_error_line("0 -1\n") == 1);

  CHECK(Graph(1, {}).size() == 1);
  CHECK_THROWS_AS(Graph(3, {{0, 1}}), ValidationError);
  CHECK_THROWS_AS(Graph(2, {{0, 2}}), ValidationError);
}

TEST_CASE("grid graph") {
  CHECK(grid_graph(1, 1).size() == 1);
  CHECK(grid_graph(1, 1).edges().empty());
  CHECK(grid_graph(2, 2).size() == 4);
  CHECK(grid_graph(2, 2).edges().size() == 4);
  const Graph g = grid_graph(10, 10);
  CHECK(g.size() == 100);
  CHECK(g.edges().size() == 2 * 10 * 10 - 10 - 10);
  CHECK(g.degree(0) == 2);
  CHECK(g.degree(11) == 4);
  CHECK(grid_graph(3, 7).edges().size() == 2 * 3 * 7 - 3 - 7);
  CHECK_THROWS_AS(grid_graph(0, 3), ValidationError);
}

TEST_CASE("bfs distances") {
  const auto path = bfs_distances(load_graph("0 1\n1 2"));
  CHECK(path(0, 2) == 2);
  CHECK(path.diameter == 2);

  const auto k4 = bfs_distances(load_graph("0 1\n0 2\n0 3\n1 2\n1 3\n2 3"));
  for (Vertex a = 0; a < 4; ++a)
    for (Vertex b = 0; b < 4; ++b) CHECK(k4(a, b) == (a == b ? 0u : 1u));
  CHECK(k4.diameter == 1);

  for (const auto& g : {grid_graph(6, 6), grid_graph(3, 8), load_graph("0 1\n1 2\n2 3\n3 0\n2 4\n4 5\n5 6\n6 2\n")}) {
    const auto d = bfs_distances(g);
    const auto ref = oracle::floyd_distances(g);
    std::size_t diameter = 0;
    for (Vertex a = 0; a < g.size(); ++a) {
      for (Vertex b = 0; b < g.size(); ++b) {
        CHECK(d(a, b) == ref[a][b]);
        CHECK(d(a, b) == d(b, a));
        diameter = std::max(diameter, ref[a][b]);
      }
    }
    CHECK(d.diameter == diameter);
  }
  CHECK(bfs_distances(grid_graph(6, 6)).diameter == 10);
  CHECK(bfs_distances(grid_graph(1, 1)).diameter == 0);
}

TEST_CASE("passive dynamics") {
  const Graph path = load_graph("0 1\n1 2");
  const auto p1 = lazy_walk(path, 0.5);
  CHECK(p1(1, 0) == 0.25);
  CHECK(p1(1, 1) == 0.5);
  CHECK(p1(1, 2) == 0.25);
  CHECK(p1(0, 1) == 0.5);

  const auto p = build_passive(path, 0.5, 0.2, 2);
  CHECK(p(0, 0) == doctest::Approx(0.8 * 0.5));
  CHECK(p(0, 2) == doctest::Approx(0.2));
  CHECK(p(2, 2) == doctest::Approx(0.8 * 0.5 + 0.2));
  for (StateIndex x = 0; x < 3; ++x) {
    double sum = 0.0;
    for (double v : p.row(x)) sum += v;
    CHECK(std::abs(sum - 1.0) <= 1e-15);
  }

  for (const auto& g : {grid_graph(10, 10), grid_graph(4, 9), path, load_graph("0 1\n0 2\n0 3\n0 4\n")}) {
    for (double delta : {0.01, 0.1, 0.5}) {
      for (double stay : {0.01, 0.3}) {
        const auto passive = build_passive(g, stay, delta, g.size() - 1);
        const auto report = ergodicity_report(passive);
        CHECK(report.irreducible);
        CHECK(report.aperiodic);
        CHECK(report.dobrushin <= 1.0 - delta + 1e-12);
      }
    }
  }
  CHECK(dobrushin_coefficient(build_passive(grid_graph(10, 10), 0.01, 0.01, 0)) <= 0.99 + 1e-12);

  CHECK_THROWS_AS(build_passive(path, 0.0, 0.1, 0), ValidationError);
  CHECK_THROWS_AS(build_passive(path, 0.5, 1.0, 0), ValidationError);
  CHECK_THROWS_AS(build_passive(path, 0.5, 0.1, 3), ValidationError);
}

TEST_CASE("tracking environment") {
  const Graph g = grid_graph(5, 4);
  const auto env = make_tracking_env(g, 500, 42);
  const auto again = make_tracking_env(g, 500, 42);
  CHECK(env.target_path() == again.target_path());
  CHECK(env.target_kernel() == again.target_kernel());
  CHECK(make_tracking_env(g, 500, 43).target_path() != env.target_path());
  CHECK(env.horizon() == 500);

  for (Vertex x = 0; x < g.size(); ++x) {
    std::set<Vertex> closed(g.neighbors(x).begin(), g.neighbors(x).end());
    closed.insert(x);
    double sum = 0.0;
    for (Vertex y = 0; y < g.size(); ++y) {
      sum += env.target_kernel()(x, y);
      if (!closed.count(y)) CHECK(env.target_kernel()(x, y) == 0.0);
    }
    CHECK(std::abs(sum - 1.0) <= 1e-12);
  }
  for (std::size_t t = 1; t < env.target_path().size(); ++t) {
    CHECK(env.target_kernel()(env.target_path()[t - 1], env.target_path()[t]) > 0.0);
  }

  const auto flat = make_tracking_env(g, 10, 1, 1e6);
  for (Vertex x = 0; x < g.size(); ++x) {
    const double expected = 1.0 / static_cast<double>(g.degree(x) + 1);
    CHECK(flat.target_kernel()(x, x) == doctest::Approx(expected).epsilon(0.02));
  }

  const auto costs = env.costs();
  CHECK(costs.size() == 500);
  for (std::size_t t = 0; t < costs.size(); ++t) {
    CHECK(costs[t][env.target_path()[t]] == 0.0);
    CHECK(costs[t].max() <= 1.0);
  }

  auto stream = make_tracking_env(g, 3, 42);
  const Vertex first = stream.target_state();
  const auto f0 = stream.next();
  CHECK(f0[first] == 0.0);
  stream.next();
  stream.next();
  CHECK_THROWS(stream.next());
}

TEST_CASE("tracking cost") {
  const auto path_env = make_tracking_env(load_graph("0 1\n1 2"), 5, 1);
  const auto f = tracking_cost(path_env, 0);
  CHECK(f[0] == 0.0);
  CHECK(f[1] == 0.5);
  CHECK(f[2] == 1.0);

  const Graph g = grid_graph(6, 6);
  const auto env = make_tracking_env(g, 5, 2);
  const auto corner = tracking_cost(env, 0);
  CHECK(corner[35] == 1.0);
  CHECK(corner.max() == 1.0);
  const auto ref = oracle::floyd_distances(g);
  for (Vertex x = 0; x < g.size(); ++x) CHECK(corner[x] == static_cast<double>(ref[0][x]) / 10.0);

  const auto single = make_tracking_env(grid_graph(1, 1), 4, 3);
  CHECK(tracking_cost(single, 0)[0] == 0.0);
  CHECK_THROWS_AS(tracking_cost(env, 36), DimensionError);
}
