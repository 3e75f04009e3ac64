#include "doctest.h"

#include <cmath>

#include "reference.hpp"
#include "tship/exact.hpp"
#include "tship/graph.hpp"
#include "tship/io.hpp"
#include "tship/solver.hpp"

using namespace tship;

TEST_CASE("solve the unit path at eps one half") {
  Instance g = make_path(4);
  g.demands = {1.0, 0.0, 0.0, -1.0};
  SolveConfig config;
  config.eps = 0.5;
  SolveReport report = solve(g, config);
  CHECK(report.converged);
  CHECK(is_routing(g, report.flow, g.demands));
  CHECK(report.cost <= 4.5 + 1e-9);
  CHECK(report.cost >= 3.0 - 1e-9);
  CHECK(report.certified_ratio >= report.cost / 3.0 - 1e-9);
}

TEST_CASE("zero demands solve to a zero flow") {
  Instance g = make_cycle(6);
  SolveConfig config;
  config.eps = 0.25;
  SolveReport report = solve(g, config);
  CHECK(report.converged);
  CHECK(report.cost == 0.0);
  CHECK(report.iterations == 0);
  for (double x : report.flow.value) CHECK(x == 0.0);
}

TEST_CASE("expensive detour cycle at eps 0.1") {
  Instance g;
  g.n = 4;
  g.edges = {{0, 1, 1.0}, {1, 2, 1.0}, {2, 3, 1.0}, {3, 0, 10.0}};
  g.demands = {1.0, 0.0, -1.0, 0.0};
  SolveConfig config;
  config.eps = 0.1;
  SolveReport report = solve(g, config);
  CHECK(report.converged);
  CHECK(is_routing(g, report.flow, g.demands));
  CHECK(report.cost <= 2.2 + 1e-9);
}

TEST_CASE("boost reaches the residual certificate on the path") {
  Instance g = make_path(4);
  g.demands = {1.0, 0.0, 0.0, -1.0};
  Solver solver = Solver::from_instance(g);
  SolveConfig config;
  config.eps = 0.5;
  BoostResult boosted = solver.boost(g.demands, config);
  CHECK(boosted.converged);
  double alpha = solver.approximator().alpha();
  CHECK(boosted.residual_norm1 <= boosted.pb_norm1 / (alpha * 16.0) + 1e-18);

  // trivial demand short-circuits
  BoostResult zero = solver.boost(std::vector<double>(4, 0.0), config);
  CHECK(zero.converged);
  CHECK(zero.iterations == 0);
}

TEST_CASE("boost cost stays within one plus half eps of optimal") {
  for (std::uint64_t seed : {1, 2, 3, 4}) {
    Instance g = make_random(22 + 4 * static_cast<std::size_t>(seed), seed);
    ExactOracle oracle(g);
    Solver solver = Solver::from_instance(g);
    for (double eps : {0.5, 0.25}) {
      std::vector<double> b = random_proper_demands(g.n, seed * 17 + 3);
      SolveConfig config;
      config.eps = eps;
      BoostResult boosted = solver.boost(b, config);
      REQUIRE(boosted.converged);
      double opt = oracle.opt(b);
      CHECK(flow_cost(g, boosted.flow) <=
            (1.0 + eps / 2.0) * opt * (1.0 + 1e-6));
    }
  }
}

TEST_CASE("boost progress is monotone from the starting norm") {
  Instance g = make_random(30, 6);
  Solver solver = Solver::from_instance(g);
  std::vector<double> b = random_proper_demands(g.n, 99);
  SolveConfig config;
  config.eps = 0.25;
  BoostResult boosted = solver.boost(b, config);
  REQUIRE(boosted.accepted_norms.size() >= 2);
  CHECK(boosted.accepted_norms.front() ==
        doctest::Approx(solver.approximator().apply_norm1(b) /
                        sum_abs(b) * sum_abs(b))
            .epsilon(1e-9));
  for (std::size_t i = 1; i < boosted.accepted_norms.size(); ++i)
    CHECK(boosted.accepted_norms[i] < boosted.accepted_norms[i - 1]);
}

TEST_CASE("residual routing modes") {
  Instance g = make_path(6);
  Solver solver = Solver::from_instance(g);

  std::vector<double> zero(g.n, 0.0);
  for (double x : solver.route_residual(zero, ResidualRouter::mst).value)
    CHECK(x == 0.0);

  std::vector<double> r = random_proper_demands(g.n, 8);
  Flow tree = solver.route_residual(r, ResidualRouter::mst);
  CHECK(is_routing(g, tree, r));
  for (EdgeId e = 0; e < g.m(); ++e) CHECK(std::isfinite(tree[e]));

  Flow apxf = solver.route_residual(r, ResidualRouter::approximator);
  CHECK(is_routing(g, apxf, r));
  CHECK(flow_cost(g, apxf) <=
        solver.approximator().apply_norm1(r) * (1.0 + 1e-9));
}

TEST_CASE("solver end to end across the seed corpus") {
  for (const Instance& g : ref::seed_corpus()) {
    ExactOracle oracle(g);
    Solver solver = Solver::from_instance(g);
    std::vector<double> b = random_proper_demands(g.n, 4242);
    double opt = oracle.opt(b);
    for (double eps : {0.5, 0.1}) {
      SolveConfig config;
      config.eps = eps;
      SolveReport report = solver.solve(b, config);
      CHECK(report.converged);
      CHECK(is_routing(g, report.flow, b));
      CHECK(report.cost <= (1.0 + eps) * opt + 1e-9 * sum_abs(b));
      CHECK(report.lower_bound <= opt * (1.0 + 1e-9));
      CHECK(report.certified_ratio * report.approx_cost_bound >=
            report.cost * solver.approximator().alpha() * (1.0 - 1e-12));
    }
  }
}

TEST_CASE("iteration caps surface as NotConverged with a partial flow") {
  Instance g = make_random(40, 2);
  Solver solver = Solver::from_instance(g);
  std::vector<double> b = random_proper_demands(g.n, 11);
  SolveConfig config;
  config.eps = 0.25;
  config.max_outer_iters = 0;
  SolveReport report = solver.solve(b, config);
  CHECK_FALSE(report.converged);
  CHECK(is_routing(g, report.flow, b));  // residual is still routed exactly
  CHECK(report.residual_norm > 0.0);
}
