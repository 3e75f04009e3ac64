#include "tship/solver.hpp"

#include <algorithm>
#include <cassert>
#include <chrono>
#include <cmath>
#include <sstream>
#include <unordered_map>

#include "tship/graph.hpp"
#include "tship/io.hpp"
#include "tship/log.hpp"

namespace tship {

namespace {

using SparseCol = std::vector<std::pair<std::size_t, double>>;

// State of one refinement round: the flow increment g, the row image
// y = P(d - I g) and the running objective c(g) + lambda * ||y||_1.
struct RoundState {
  std::vector<double> g;
  double cg = 0.0;
  std::vector<double> y;
  double ynorm = 0.0;
};

// Exact minimization of the piecewise-linear objective along one edge
// coordinate: c_e |g_e + t| + lambda * sum_r |y_r - t col_r| for t in
// [lo, hi]. Returns the step; 0 means the coordinate is already optimal.
double coordinate_step(double edge_cost, double g_e, const SparseCol& col,
                       const std::vector<double>& y, double lambda, double lo,
                       double hi) {
  struct Breakpoint {
    double t;
    double jump;
  };
  static thread_local std::vector<Breakpoint> breaks;
  breaks.clear();

  auto right_slope = [](double x, double rate) {
    // right derivative of |x - t*rate| in t
    if (x > 0.0) return -rate;
    if (x < 0.0) return rate;
    return std::abs(rate);
  };

  double slope = right_slope(-g_e - lo, -1.0) * edge_cost;
  if (-g_e > lo && -g_e < hi) breaks.push_back({-g_e, 2.0 * edge_cost});
  for (const auto& [row, cr] : col) {
    if (cr == 0.0) continue;
    slope += lambda * right_slope(y[row] - lo * cr, cr);
    double t = y[row] / cr;
    if (t > lo && t < hi) breaks.push_back({t, 2.0 * lambda * std::abs(cr)});
  }
  if (slope >= 0.0) return lo == 0.0 ? 0.0 : lo;

  std::sort(breaks.begin(), breaks.end(),
            [](const Breakpoint& a, const Breakpoint& b) { return a.t < b.t; });
  double t = lo;
  for (const Breakpoint& bp : breaks) {
    slope += bp.jump;
    if (slope >= 0.0) {
      t = bp.t;
      break;
    }
    t = bp.t;
  }
  if (slope < 0.0) t = hi;
  return t;
}

void apply_coordinate(RoundState& st, EdgeId e, double edge_cost, double t,
                      const SparseCol& col, double lambda) {
  (void)lambda;
  if (t == 0.0) return;
  st.cg += edge_cost * (std::abs(st.g[e] + t) - std::abs(st.g[e]));
  st.g[e] += t;
  for (const auto& [row, cr] : col) {
    double before = std::abs(st.y[row]);
    st.y[row] -= t * cr;
    st.ynorm += std::abs(st.y[row]) - before;
  }
}

}  // namespace

BoostResult Solver::boost(const std::vector<double>& b,
                          const SolveConfig& config) const {
  const Instance& instance = apx_.instance();
  const std::size_t m = instance.m();
  const std::size_t rows = apx_.row_count();
  const double n = static_cast<double>(instance.n);

  BoostResult result;
  result.flow = Flow(m);
  result.residual = b;

  const double demand_scale = sum_abs(b);
  if (demand_scale == 0.0) {
    result.converged = true;
    return result;
  }
  std::vector<double> bn(b);
  for (double& x : bn) x /= demand_scale;

  std::vector<double> yd = apx_.apply(bn);
  const double pb = sum_abs(yd);
  result.pb_norm1 = pb * demand_scale;
  if (pb == 0.0) {
    result.converged = true;
    return result;
  }

  const double rtf = config.residual_target_factor > 0.0
                         ? config.residual_target_factor
                         : 1.0 / (n * n);
  const double target = pb * rtf / apx_.alpha();
  const double lambda = 4.0 / config.eps;
  const double delta_acc = config.eps / 8.0;
  long max_inner = config.max_inner_iters;
  if (max_inner <= 0) {
    double v = std::ceil(4.0 * apx_.alpha() * apx_.alpha() /
                         (config.eps * config.eps) * std::log(n));
    max_inner = v > 2e18 ? static_cast<long>(2e18) : static_cast<long>(v);
  }

  std::vector<double> fprime(m, 0.0);
  std::vector<double> d = bn;
  double cur = pb;
  double rho = pb / apx_.alpha();
  double lower_bound = 0.0;

  // Per-edge response columns of the approximator, shared across rounds.
  std::unordered_map<EdgeId, SparseCol> columns;
  auto column_of = [&](EdgeId e) -> const SparseCol& {
    auto it = columns.find(e);
    if (it == columns.end()) {
      SparseCol col;
      apx_.edge_column(instance.edges[e].u, instance.edges[e].v, col);
      it = columns.emplace(e, std::move(col)).first;
    }
    return it->second;
  };

  auto update_lower_bound = [&](const std::vector<double>& h) {
    double grad_inf = 0.0;
    for (EdgeId e = 0; e < m; ++e) {
      double g = std::abs(h[instance.edges[e].u] - h[instance.edges[e].v]) /
                 instance.edges[e].cost;
      grad_inf = std::max(grad_inf, g);
    }
    if (grad_inf <= 0.0) return;
    double inner = 0.0;
    for (std::size_t v = 0; v < bn.size(); ++v) inner += h[v] * bn[v];
    lower_bound = std::max(lower_bound, std::abs(inner) / grad_inf);
  };

  constexpr long kRoundBudget = 96;
  constexpr int kCertEvery = 4;
  RoundState st;
  std::vector<double> weights(rows);

  result.accepted_norms.push_back(cur);
  while (cur > target) {
    if (result.rounds >= config.max_outer_iters ||
        result.iterations >= max_inner) {
      result.residual_norm1 = cur * demand_scale;
      for (EdgeId e = 0; e < m; ++e) result.flow[e] = fprime[e] * demand_scale;
      result.residual = residual(instance, b, result.flow);
      result.lower_bound = lower_bound * demand_scale;
      log_info("boost: caps hit, residual norm " +
               format_double(result.residual_norm1));
      return result;
    }

    st.g.assign(m, 0.0);
    st.cg = 0.0;
    st.y = yd;
    st.ynorm = cur;

    double theta = config.smoothing;
    bool certified = false;
    double f_best = st.cg + lambda * st.ynorm;
    long since_progress = 0;
    std::vector<EdgeId> active;
    std::vector<char> in_active(m, 0);

    for (long it = 0; it < kRoundBudget; ++it) {
      if (result.iterations >= max_inner) break;
      ++result.iterations;

      // softmax direction over the row image
      double yinf = 0.0;
      for (double v : st.y) yinf = std::max(yinf, std::abs(v));
      if (yinf == 0.0) break;
      double beta = std::max(theta * yinf / std::log(2.0 * rows + 2.0),
                             1e-300);
      double z = 0.0;
      for (std::size_t r = 0; r < rows; ++r) {
        double a = std::exp((std::abs(st.y[r]) - yinf) / beta);
        double q = std::exp((-std::abs(st.y[r]) - yinf) / beta);
        z += a + q;
        weights[r] = (st.y[r] >= 0.0 ? a - q : q - a);
      }
      for (double& w : weights) w /= z;

      std::vector<double> h = apx_.apply_transpose(weights);
      update_lower_bound(h);

      EdgeId best_edge = 0;
      double best_score = -1.0;
      for (EdgeId e = 0; e < m; ++e) {
        double s = std::abs(h[instance.edges[e].u] - h[instance.edges[e].v]) /
                   instance.edges[e].cost;
        if (s > best_score) {
          best_score = s;
          best_edge = e;
        }
      }
      if (!in_active[best_edge]) {
        in_active[best_edge] = 1;
        active.push_back(best_edge);
      }

      // line search on the newly discovered edge, then a sweep over the
      // active set
      for (std::size_t sweep = 0; sweep <= active.size(); ++sweep) {
        EdgeId e = sweep == 0 ? best_edge : active[sweep - 1];
        double ce = instance.edges[e].cost;
        const SparseCol& col = column_of(e);
        double cap = (rho - st.cg) / ce + std::abs(st.g[e]);
        if (cap <= 0.0) continue;
        double lo = -st.g[e] - cap, hi = -st.g[e] + cap;
        double t =
            coordinate_step(ce, st.g[e], col, st.y, lambda, lo, hi);
        apply_coordinate(st, e, ce, t, col, lambda);
      }

      double f_now = st.cg + lambda * st.ynorm;
      if (f_now < f_best * (1.0 - 1e-4))
        since_progress = 0;
      else
        ++since_progress;
      f_best = std::min(f_best, f_now);

      if ((it + 1) % kCertEvery == 0 || since_progress >= 8) {
        // exact subgradient certificate against the ball minimum
        for (std::size_t r = 0; r < rows; ++r)
          weights[r] = st.y[r] > 0.0 ? 1.0 : (st.y[r] < 0.0 ? -1.0 : 0.0);
        std::vector<double> hs = apx_.apply_transpose(weights);
        update_lower_bound(hs);
        double inner = 0.0, xi_inf = 0.0;
        for (EdgeId e = 0; e < m; ++e) {
          double ce = instance.edges[e].cost;
          double xi_phi =
              -lambda * (hs[instance.edges[e].u] - hs[instance.edges[e].v]);
          double xi;
          if (st.g[e] > 0.0)
            xi = ce + xi_phi;
          else if (st.g[e] < 0.0)
            xi = -ce + xi_phi;
          else
            xi = xi_phi - std::clamp(xi_phi, -ce, ce);
          inner += xi * st.g[e];
          xi_inf = std::max(xi_inf, std::abs(xi) / ce);
        }
        double gap = inner + rho * xi_inf;
        double f_val = st.cg + lambda * st.ynorm;
        if (gap <= delta_acc / (1.0 + delta_acc) * f_val) {
          certified = true;
          break;
        }
      }
      if (since_progress >= 8) {
        theta *= 0.5;
        since_progress = 0;
        if (theta < config.smoothing * 1e-3) break;
      }
    }

    ++result.rounds;
    // exact recompute of the round result to keep drift out of the accept
    // decision
    std::vector<double> g_residual(d);
    {
      std::vector<double> net(instance.n, 0.0);
      for (EdgeId e = 0; e < m; ++e) {
        net[instance.edges[e].u] += st.g[e];
        net[instance.edges[e].v] -= st.g[e];
      }
      for (std::size_t v = 0; v < instance.n; ++v) g_residual[v] -= net[v];
    }
    std::vector<double> ynew = apx_.apply(g_residual);
    double new_norm = sum_abs(ynew);

    if (new_norm <= 0.9 * cur) {
      for (EdgeId e = 0; e < m; ++e) fprime[e] += st.g[e];
      d = std::move(g_residual);
      yd = std::move(ynew);
      double prev = cur;
      cur = new_norm;
      result.accepted_norms.push_back(cur);
      rho = std::max(cur, rho * (cur / prev));
      log_debug("boost: accepted round " + std::to_string(result.rounds) +
                " norm " + format_double(cur) +
                (certified ? " (certified)" : ""));
    } else {
      rho *= 2.0;
      log_debug("boost: round " + std::to_string(result.rounds) +
                " rejected, ball now " + format_double(rho));
    }
  }

  for (EdgeId e = 0; e < m; ++e) result.flow[e] = fprime[e] * demand_scale;
  result.residual = residual(instance, b, result.flow);
  result.residual_norm1 = cur * demand_scale;
  result.lower_bound = lower_bound * demand_scale;
  result.converged = true;
  return result;
}

Flow Solver::route_residual(const std::vector<double>& residual,
                            ResidualRouter router) const {
  if (router == ResidualRouter::approximator)
    return apx_.flow_from_p(residual);
  return mst_route(apx_.instance(), residual);
}

SolveReport Solver::solve(const std::vector<double>& b,
                          const SolveConfig& config) const {
  auto t0 = std::chrono::steady_clock::now();
  SolveReport report;

  BoostResult boosted = boost(b, config);
  Flow routed = route_residual(boosted.residual, config.residual_router);
  report.flow = std::move(boosted.flow);
  for (EdgeId e = 0; e < report.flow.size(); ++e) report.flow[e] += routed[e];

  report.cost = flow_cost(apx_.instance(), report.flow);
  report.approx_cost_bound = boosted.pb_norm1;
  report.certified_ratio =
      boosted.pb_norm1 > 0.0
          ? report.cost * apx_.alpha() / boosted.pb_norm1
          : 1.0;
  report.iterations = boosted.iterations;
  report.rounds = boosted.rounds;
  report.converged = boosted.converged;
  report.residual_norm = boosted.residual_norm1;
  report.lower_bound = boosted.lower_bound;
  report.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  return report;
}

SolveReport solve(const Instance& instance, const SolveConfig& config) {
  Solver solver = Solver::from_instance(instance);
  return solver.solve(instance.demands, config);
}

std::string render_report(const SolveReport& report) {
  std::ostringstream out;
  out << "cost " << format_double(report.cost) << '\n'
      << "approx_cost_bound " << format_double(report.approx_cost_bound) << '\n'
      << "certified_ratio " << format_double(report.certified_ratio) << '\n'
      << "lower_bound " << format_double(report.lower_bound) << '\n'
      << "iterations " << report.iterations << '\n'
      << "rounds " << report.rounds << '\n'
      << "residual_norm " << format_double(report.residual_norm) << '\n'
      << "converged " << (report.converged ? 1 : 0) << '\n'
      << "wall_time_s " << format_double(report.wall_time_s) << '\n';
  return out.str();
}

}  // namespace tship
