#include "tship/exact.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <numeric>
#include <queue>

#include "tship/io.hpp"

namespace tship {

ExactOracle::ExactOracle(const Instance& instance, std::size_t size_guard)
    : instance_(instance), adj_(instance.n, instance.edges) {
  if (instance.n > size_guard)
    throw Error(ErrorCode::TooLarge,
                "exact oracle guard: n = " + std::to_string(instance.n) +
                    " > " + std::to_string(size_guard));
  trees_.resize(instance.n);
}

const DistanceResult& ExactOracle::tree(VertexId u) const {
  if (!trees_[u])
    trees_[u] = std::make_unique<DistanceResult>(dijkstra(adj_, u));
  return *trees_[u];
}

namespace {

struct Augmentation {
  // transportation allocations source -> sink
  std::vector<std::vector<double>> x;
};

}  // namespace

OracleSolution ExactOracle::solve(const std::vector<double>& b) const {
  std::vector<VertexId> sources, sinks;
  for (VertexId v = 0; v < instance_.n; ++v) {
    if (b[v] > 0.0) sources.push_back(v);
    if (b[v] < 0.0) sinks.push_back(v);
  }
  OracleSolution out;
  out.flow = Flow(instance_.m());
  if (sources.empty() || sinks.empty()) return out;

  const std::size_t ns = sources.size(), nt = sinks.size();
  std::vector<double> supply(ns), deficit(nt);
  for (std::size_t i = 0; i < ns; ++i) supply[i] = b[sources[i]];
  for (std::size_t j = 0; j < nt; ++j) deficit[j] = -b[sinks[j]];

  // metric costs between terminals
  std::vector<std::vector<double>> cost(ns, std::vector<double>(nt));
  for (std::size_t i = 0; i < ns; ++i) {
    const DistanceResult& t = tree(sources[i]);
    for (std::size_t j = 0; j < nt; ++j) cost[i][j] = t.dist[sinks[j]];
  }

  std::vector<std::vector<double>> x(ns, std::vector<double>(nt, 0.0));
  // node potentials keep all residual reduced costs nonnegative; nodes
  // 0..ns-1 are sources, ns..ns+nt-1 sinks
  const std::size_t nn = ns + nt;
  std::vector<double> pot(nn, 0.0);
  const double total_supply =
      std::accumulate(supply.begin(), supply.end(), 0.0);
  const double slack = 1e-14 * std::max(1.0, total_supply);
  auto live = [&](const std::vector<double>& rem) {
    for (double x : rem)
      if (x > slack) return true;
    return false;
  };

  std::size_t guard = 8 * nn * nn + 64;
  while (live(supply) && live(deficit)) {
    if (guard-- == 0)
      throw Error(ErrorCode::NotConverged,
                  "transportation augmentation guard tripped");
    std::vector<double> dist(nn, kInf);
    std::vector<std::int32_t> prev(nn, -1);
    struct Item {
      double d;
      std::uint32_t v;
      bool operator>(const Item& o) const {
        if (d != o.d) return d > o.d;
        return v > o.v;
      }
    };
    std::priority_queue<Item, std::vector<Item>, std::greater<Item>> heap;
    for (std::size_t i = 0; i < ns; ++i)
      if (supply[i] > slack) {
        dist[i] = 0.0;
        heap.push({0.0, static_cast<std::uint32_t>(i)});
      }
    std::vector<char> done(nn, 0);
    while (!heap.empty()) {
      auto [d, v] = heap.top();
      heap.pop();
      if (done[v]) continue;
      done[v] = 1;
      if (v < ns) {
        std::size_t i = v;
        for (std::size_t j = 0; j < nt; ++j) {
          double rc = cost[i][j] + pot[i] - pot[ns + j];
          assert(rc > -1e-7 * (1.0 + std::abs(cost[i][j])));
          double nd = d + std::max(rc, 0.0);
          if (nd < dist[ns + j]) {
            dist[ns + j] = nd;
            prev[ns + j] = static_cast<std::int32_t>(i);
            heap.push({nd, static_cast<std::uint32_t>(ns + j)});
          }
        }
      } else {
        std::size_t j = v - ns;
        for (std::size_t i = 0; i < ns; ++i) {
          if (x[i][j] <= 0.0) continue;
          double rc = -cost[i][j] + pot[ns + j] - pot[i];
          assert(rc > -1e-7 * (1.0 + std::abs(cost[i][j])));
          double nd = d + std::max(rc, 0.0);
          if (nd < dist[i]) {
            dist[i] = nd;
            prev[i] = static_cast<std::int32_t>(ns + j);
            heap.push({nd, static_cast<std::uint32_t>(i)});
          }
        }
      }
    }

    // nearest sink with remaining deficit
    std::size_t best = nt;
    for (std::size_t j = 0; j < nt; ++j) {
      if (deficit[j] <= slack || dist[ns + j] == kInf) continue;
      if (best == nt || dist[ns + j] < dist[ns + best]) best = j;
    }
    assert(best != nt);

    // bottleneck along the alternating path
    double amount = deficit[best];
    for (std::int32_t v = static_cast<std::int32_t>(ns + best); prev[v] >= 0;
         v = prev[v]) {
      std::int32_t p = prev[v];
      if (v >= static_cast<std::int32_t>(ns)) {
        if (prev[p] < 0) amount = std::min(amount, supply[p]);
      } else {
        amount = std::min(amount, x[v][p - ns]);
      }
    }
    assert(amount > 0.0);

    std::int32_t v = static_cast<std::int32_t>(ns + best);
    while (prev[v] >= 0) {
      std::int32_t p = prev[v];
      if (v >= static_cast<std::int32_t>(ns))
        x[p][v - ns] += amount;
      else
        x[v][p - ns] -= amount;
      v = p;
    }
    supply[v] -= amount;
    deficit[best] -= amount;

    double cap = dist[ns + best];
    for (std::size_t u = 0; u < nn; ++u)
      pot[u] += std::min(dist[u], cap);
  }

  double value = 0.0;
  for (std::size_t i = 0; i < ns; ++i)
    for (std::size_t j = 0; j < nt; ++j)
      if (x[i][j] != 0.0) value += x[i][j] * cost[i][j];
  out.opt_value = value;

  for (std::size_t i = 0; i < ns; ++i) {
    const DistanceResult& t = tree(sources[i]);
    for (std::size_t j = 0; j < nt; ++j)
      if (x[i][j] > 0.0)
        add_path_flow(instance_, t, sources[i], sinks[j], x[i][j], out.flow);
  }
  return out;
}

double ExactOracle::opt(const std::vector<double>& b) const {
  return solve(b).opt_value;
}

OracleSolution exact_opt(const Instance& instance, std::size_t size_guard) {
  ExactOracle oracle(instance, size_guard);
  return oracle.solve(instance.demands);
}

SandwichReport verify_sandwich(const Approximator& apx, std::size_t num_demands,
                               std::uint64_t seed) {
  const Instance& instance = apx.instance();
  ExactOracle oracle(instance);
  SandwichReport report;
  report.min_ratio = kInf;
  report.max_ratio = 0.0;
  for (std::size_t c = 0; c < num_demands; ++c) {
    std::vector<double> b =
        random_proper_demands(instance.n, seed + 0x9e3779b97f4a7c15ULL * c);
    double opt = oracle.opt(b);
    if (opt <= 0.0) {
      ++report.skipped;
      continue;
    }
    double ratio = apx.apply_norm1(b) / opt;
    report.min_ratio = std::min(report.min_ratio, ratio);
    report.max_ratio = std::max(report.max_ratio, ratio);
    ++report.cases;
    if (ratio < 1.0 - 1e-9 || ratio > apx.alpha() * (1.0 + 1e-9))
      report.pass = false;
  }
  return report;
}

}  // namespace tship
