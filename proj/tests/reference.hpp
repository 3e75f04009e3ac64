#pragma once

// Independent brute-force references used to derive expected test values.
// Everything here is deliberately naive and kept separate from the library
// implementation paths it checks.

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "tship/io.hpp"
#include "tship/layers.hpp"
#include "tship/oracle.hpp"
#include "tship/types.hpp"

namespace ref {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Bellman-Ford single source distances over an undirected edge list.
inline std::vector<double> bellman_ford(std::size_t n,
                                        const std::vector<tship::Edge>& edges,
                                        tship::VertexId source) {
  std::vector<double> dist(n, kInf);
  dist[source] = 0.0;
  for (std::size_t round = 0; round + 1 < n; ++round) {
    bool changed = false;
    for (const tship::Edge& e : edges) {
      if (dist[e.u] + e.cost < dist[e.v]) {
        dist[e.v] = dist[e.u] + e.cost;
        changed = true;
      }
      if (dist[e.v] + e.cost < dist[e.u]) {
        dist[e.u] = dist[e.v] + e.cost;
        changed = true;
      }
    }
    if (!changed) break;
  }
  return dist;
}

// Floyd-Warshall all-pairs distances.
inline std::vector<std::vector<double>> apsp(
    std::size_t n, const std::vector<tship::Edge>& edges) {
  std::vector<std::vector<double>> d(n, std::vector<double>(n, kInf));
  for (std::size_t v = 0; v < n; ++v) d[v][v] = 0.0;
  for (const tship::Edge& e : edges) {
    d[e.u][e.v] = std::min(d[e.u][e.v], e.cost);
    d[e.v][e.u] = std::min(d[e.v][e.u], e.cost);
  }
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (d[i][k] + d[k][j] < d[i][j]) d[i][j] = d[i][k] + d[k][j];
  return d;
}

// Bundle pieces computed literally from the definition, given all-pairs
// layer distances and the sample sets.
inline std::vector<std::vector<std::pair<std::uint32_t, double>>>
brute_bundle_pieces(const tship::Layer& layer,
                    const std::vector<std::vector<double>>& dist,
                    const std::vector<std::vector<std::uint32_t>>& samples,
                    std::uint32_t v) {
  const int k = static_cast<int>(samples.size());
  auto ranked = [&](std::uint32_t a, std::uint32_t b) {
    return tship::RankedDist{dist[a][b], layer.rep[b]};
  };
  std::vector<std::vector<std::pair<std::uint32_t, double>>> pieces(k);
  for (int j = 0; j < k; ++j) {
    tship::RankedDist next{kInf, 0};
    if (j + 1 < k) {
      bool found = false;
      for (std::uint32_t w : samples[j + 1]) {
        if (dist[v][w] == kInf) continue;
        tship::RankedDist r = ranked(v, w);
        if (!found || r < next) {
          next = r;
          found = true;
        }
      }
      if (!found) next = {kInf, 0};
    }
    for (std::uint32_t w : samples[j]) {
      if (dist[v][w] == kInf) continue;
      if (ranked(v, w) < next) pieces[j].push_back({w, dist[v][w]});
    }
    std::sort(pieces[j].begin(), pieces[j].end(),
              [&](const auto& a, const auto& b) {
                return ranked(v, a.first) < ranked(v, b.first);
              });
  }
  return pieces;
}

// Event-driven run of the radius sweep that defines the distribution
// masses: between consecutive radius events the deepest reached piece
// splits mass evenly among its members within radius. Independent of the
// closed-form suffix sums used by the library.
inline std::vector<double> sweep_distribution(const tship::OracleData& oracle,
                                              std::uint32_t v, double delta) {
  std::vector<double> mass(oracle.bundle_size(v), 0.0);
  std::size_t base = oracle.piece_begin(v, 0);

  std::vector<double> events{0.0, delta};
  for (int j = 0; j < oracle.k; ++j)
    for (std::size_t i = oracle.piece_begin(v, j); i < oracle.piece_end(v, j);
         ++i)
      if (oracle.members[i].dist <= delta)
        events.push_back(oracle.members[i].dist);
  std::sort(events.begin(), events.end());
  events.erase(std::unique(events.begin(), events.end()), events.end());

  for (std::size_t s = 0; s + 1 < events.size(); ++s) {
    double lo = events[s], hi = events[s + 1];
    double mid = 0.5 * (lo + hi);
    // deepest piece with a member within radius mid
    int level = -1;
    for (int j = oracle.k - 1; j >= 0; --j) {
      std::size_t pb = oracle.piece_begin(v, j);
      if (pb != oracle.piece_end(v, j) && oracle.members[pb].dist <= mid) {
        level = j;
        break;
      }
    }
    if (level < 0) continue;
    std::vector<std::size_t> active;
    for (std::size_t i = oracle.piece_begin(v, level);
         i < oracle.piece_end(v, level); ++i)
      if (oracle.members[i].dist <= mid) active.push_back(i - base);
    double share = (hi - lo) / (delta * static_cast<double>(active.size()));
    for (std::size_t i : active) mass[i] += share;
  }
  return mass;
}

// Small deterministic corpus shared by the tests.
inline std::vector<tship::Instance> seed_corpus() {
  std::vector<tship::Instance> out;
  out.push_back(tship::make_path(8));
  out.push_back(tship::make_cycle(9));
  out.push_back(tship::make_grid(4, 4));
  for (std::uint64_t seed = 1; seed <= 4; ++seed)
    out.push_back(tship::make_random(24 + 8 * seed, seed));
  return out;
}

}  // namespace ref
