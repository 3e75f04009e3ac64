#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "tship/types.hpp"

namespace tship {

// Compressed adjacency over a fixed edge list. Each undirected edge appears
// twice, once per endpoint.
class Adjacency {
 public:
  struct Arc {
    VertexId to;
    EdgeId edge;
    double cost;
  };

  Adjacency() = default;
  Adjacency(std::size_t n, const std::vector<Edge>& edges);

  std::span<const Arc> operator[](VertexId u) const {
    return {arcs_.data() + offset_[u], offset_[u + 1] - offset_[u]};
  }
  std::size_t n() const { return offset_.empty() ? 0 : offset_.size() - 1; }

 private:
  std::vector<std::size_t> offset_;
  std::vector<Arc> arcs_;
};

// Checks all instance invariants and returns the instance unchanged.
// Throws Error with one of: Disconnected, ImproperDemands, NonpositiveCost,
// ParallelEdgeOrLoop, TooSmall.
const Instance& validate(const Instance& instance);

// Single-source shortest paths with binary heap; ties between equal
// distances are broken by vertex id, so the induced order is total.
DistanceResult dijkstra(const Adjacency& adj, VertexId source);
DistanceResult dijkstra(const Instance& instance, VertexId source);

// Sum of the two largest ranked distances from the smallest vertex id.
// Lands in [diameter, 2 * diameter] for a connected graph.
double compute_delta0(const Instance& instance);

// Net out-flow at every vertex under the fixed orientation.
std::vector<double> net_outflow(const Instance& instance, const Flow& f);

// b minus the net out-flow of f; proper whenever b is proper.
std::vector<double> residual(const Instance& instance,
                             const std::vector<double>& b, const Flow& f);

double flow_cost(const Instance& instance, const Flow& f);

// True when ||b - I f||_inf <= tol * ||b||_1, with an absolute fallback of
// 1e-12 for all-zero demands.
bool is_routing(const Instance& instance, const Flow& f,
                const std::vector<double>& b, double tol = 1e-9);

// Routes b exactly along a minimum spanning tree; each tree edge carries
// the net demand of the subtree hanging below it.
Flow mst_route(const Instance& instance, const std::vector<double>& b);

// Adds `amount` units along the canonical shortest path from `from` to
// `to`. The canonical path is read off the Dijkstra parent tree rooted at
// the smaller endpoint id.
void add_path_flow(const Instance& instance, const DistanceResult& tree,
                   VertexId from, VertexId to, double amount, Flow& f);

double sum_abs(const std::vector<double>& v);

}  // namespace tship
