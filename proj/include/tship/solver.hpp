#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tship/approx.hpp"
#include "tship/types.hpp"

namespace tship {

enum class ResidualRouter { mst, approximator };

struct SolveConfig {
  double eps = 0.1;
  // rounds of refinement, counting ball-doubling retries
  long max_outer_iters = 600;
  // total gradient iterations; 0 derives ceil(4 alpha^2 eps^-2 ln n)
  long max_inner_iters = 0;
  // residual certificate ||P r||_1 <= ||P b||_1 * factor / alpha;
  // 0 derives 1/n^2
  double residual_target_factor = 0.0;
  ResidualRouter residual_router = ResidualRouter::mst;
  // softmax temperature as a fraction of ||y||_inf
  double smoothing = 0.25;
};

struct BoostResult {
  Flow flow;                     // near-feasible flow f'
  std::vector<double> residual;  // b minus the net out-flow of f'
  double pb_norm1 = 0.0;         // ||P b||_1
  double residual_norm1 = 0.0;   // ||P residual||_1 at exit
  long iterations = 0;
  long rounds = 0;
  bool converged = false;
  double lower_bound = 0.0;  // certified lower bound on OPT(b)
  std::vector<double> accepted_norms;
};

struct SolveReport {
  Flow flow;
  double cost = 0.0;
  double approx_cost_bound = 0.0;  // ||P b||_1
  double certified_ratio = 0.0;    // cost * alpha / ||P b||_1
  long iterations = 0;
  long rounds = 0;
  double wall_time_s = 0.0;
  bool converged = false;
  double residual_norm = 0.0;
  double lower_bound = 0.0;
};

class Solver {
 public:
  explicit Solver(Approximator apx) : apx_(std::move(apx)) {}
  static Solver from_instance(const Instance& instance) {
    return Solver(Approximator::build(instance));
  }

  const Approximator& approximator() const { return apx_; }

  // Drives ||P (b - I f')||_1 below the residual certificate target by
  // rounds of refinement against the cost approximator. Never increases the
  // residual norm; non-improving rounds are retried on a doubled cost ball.
  BoostResult boost(const std::vector<double>& b,
                    const SolveConfig& config) const;

  Flow route_residual(const std::vector<double>& residual,
                      ResidualRouter router) const;

  SolveReport solve(const std::vector<double>& b,
                    const SolveConfig& config) const;

 private:
  Approximator apx_;
};

// Full pipeline on instance.demands: validate, build, boost, route the
// residual. The returned flow always routes the demands; `converged`
// reports whether the residual certificate was met within the caps.
SolveReport solve(const Instance& instance, const SolveConfig& config);

std::string render_report(const SolveReport& report);

}  // namespace tship
