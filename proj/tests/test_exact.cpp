#include "doctest.h"

#include <cmath>

#include "reference.hpp"
#include "tship/exact.hpp"
#include "tship/graph.hpp"
#include "tship/io.hpp"

using namespace tship;

namespace {

// Optimality of a flow via the residual digraph: no negative cycle may
// exist when every |f_e| kink is expanded into its one-sided costs.
bool residual_has_negative_cycle(const Instance& g, const Flow& f) {
  struct Arc {
    VertexId from, to;
    double cost;
  };
  std::vector<Arc> arcs;
  for (EdgeId e = 0; e < g.m(); ++e) {
    const Edge& ed = g.edges[e];
    double forward = f[e] >= 0.0 ? ed.cost : -ed.cost;
    double backward = f[e] <= 0.0 ? ed.cost : -ed.cost;
    arcs.push_back({ed.u, ed.v, forward});
    arcs.push_back({ed.v, ed.u, backward});
  }
  std::vector<double> dist(g.n, 0.0);
  const double tol = -1e-9;
  for (std::size_t round = 0; round < g.n; ++round) {
    bool changed = false;
    for (const Arc& a : arcs)
      if (dist[a.from] + a.cost < dist[a.to] + tol) {
        dist[a.to] = dist[a.from] + a.cost;
        changed = true;
      }
    if (!changed) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("exact optimum on the unit path") {
  Instance g = make_path(4);
  g.demands = {1.0, 0.0, 0.0, -1.0};
  OracleSolution sol = exact_opt(g);
  CHECK(sol.opt_value == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(is_routing(g, sol.flow, g.demands));
}

TEST_CASE("exact optimum on the unit 4-cycle") {
  Instance g = make_cycle(4);
  g.demands = {1.0, 0.0, -1.0, 0.0};
  OracleSolution sol = exact_opt(g);
  CHECK(sol.opt_value == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(is_routing(g, sol.flow, g.demands));
}

TEST_CASE("witness flows are optimal under cycle perturbations") {
  for (std::uint64_t seed = 1; seed <= 8; ++seed) {
    Instance g = make_random(10, seed);
    std::vector<double> b = random_proper_demands(g.n, seed * 31);
    ExactOracle oracle(g);
    OracleSolution sol = oracle.solve(b);
    CHECK(is_routing(g, sol.flow, b));
    CHECK(flow_cost(g, sol.flow) ==
          doctest::Approx(sol.opt_value).epsilon(1e-9));
    CHECK_FALSE(residual_has_negative_cycle(g, sol.flow));
  }
}

TEST_CASE("opt lower-bounds every feasible flow") {
  for (std::uint64_t seed : {2, 9}) {
    Instance g = make_random(18, seed);
    std::vector<double> b = random_proper_demands(g.n, seed + 500);
    ExactOracle oracle(g);
    double opt = oracle.opt(b);
    Flow tree = mst_route(g, b);
    CHECK(opt <= flow_cost(g, tree) * (1.0 + 1e-9));
  }
}

TEST_CASE("size guard throws TooLarge") {
  Instance g = make_path(400);
  CHECK_THROWS_WITH_AS(exact_opt(g), doctest::Contains("TooLarge"), Error);
  CHECK_NOTHROW(ExactOracle(g, 500));
}

TEST_CASE("sandwich batch on the unit path") {
  Instance g = make_path(4);
  Approximator apx = Approximator::build(g);
  SandwichReport report = verify_sandwich(apx, 20, 77);
  CHECK(report.pass);
  CHECK(report.cases + report.skipped == 20);
  CHECK(report.min_ratio >= 1.0 - 1e-9);
  CHECK(report.max_ratio <= apx.alpha());
}

TEST_CASE("sandwich batch across the seed corpus") {
  for (const Instance& g : ref::seed_corpus()) {
    Approximator apx = Approximator::build(g);
    SandwichReport report = verify_sandwich(apx, 25, 13);
    CHECK(report.pass);
  }
}
