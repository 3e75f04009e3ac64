#include "tship/graph.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstdlib>
#include <numeric>
#include <queue>

namespace tship {

const char* error_token(ErrorCode code) {
  switch (code) {
    case ErrorCode::Disconnected: return "Disconnected";
    case ErrorCode::ImproperDemands: return "ImproperDemands";
    case ErrorCode::NonpositiveCost: return "NonpositiveCost";
    case ErrorCode::ParallelEdgeOrLoop: return "ParallelEdgeOrLoop";
    case ErrorCode::TooSmall: return "TooSmall";
    case ErrorCode::TooLarge: return "TooLarge";
    case ErrorCode::DegenerateLayer: return "DegenerateLayer";
    case ErrorCode::NotConverged: return "NotConverged";
    case ErrorCode::ParseError: return "ParseError";
  }
  return "UnknownError";
}

Adjacency::Adjacency(std::size_t n, const std::vector<Edge>& edges) {
  offset_.assign(n + 1, 0);
  for (const Edge& e : edges) {
    ++offset_[e.u + 1];
    ++offset_[e.v + 1];
  }
  for (std::size_t i = 1; i <= n; ++i) offset_[i] += offset_[i - 1];
  arcs_.resize(edges.size() * 2);
  std::vector<std::size_t> cursor(offset_.begin(), offset_.end() - 1);
  for (EdgeId e = 0; e < edges.size(); ++e) {
    const Edge& ed = edges[e];
    arcs_[cursor[ed.u]++] = {ed.v, e, ed.cost};
    arcs_[cursor[ed.v]++] = {ed.u, e, ed.cost};
  }
}

double sum_abs(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += std::abs(x);
  return s;
}

const Instance& validate(const Instance& instance) {
  if (instance.n < 4)
    throw Error(ErrorCode::TooSmall,
                "need at least 4 vertices, got " + std::to_string(instance.n));
  if (instance.demands.size() != instance.n)
    throw Error(ErrorCode::ImproperDemands, "demand vector size mismatch");

  std::vector<std::vector<VertexId>> seen(instance.n);
  for (const Edge& e : instance.edges) {
    if (e.u >= instance.n || e.v >= instance.n)
      throw Error(ErrorCode::ParseError, "edge endpoint out of range");
    if (!(e.cost > 0.0) || !std::isfinite(e.cost))
      throw Error(ErrorCode::NonpositiveCost,
                  "edge cost must be strictly positive");
    if (e.u == e.v) throw Error(ErrorCode::ParallelEdgeOrLoop, "self loop");
    VertexId a = std::min(e.u, e.v), b = std::max(e.u, e.v);
    auto& lst = seen[a];
    if (std::find(lst.begin(), lst.end(), b) != lst.end())
      throw Error(ErrorCode::ParallelEdgeOrLoop, "parallel edge");
    lst.push_back(b);
  }

  // Connectivity by BFS over the adjacency.
  Adjacency adj(instance.n, instance.edges);
  std::vector<char> visited(instance.n, 0);
  std::vector<VertexId> stack{0};
  visited[0] = 1;
  std::size_t count = 1;
  while (!stack.empty()) {
    VertexId u = stack.back();
    stack.pop_back();
    for (const auto& arc : adj[u]) {
      if (!visited[arc.to]) {
        visited[arc.to] = 1;
        ++count;
        stack.push_back(arc.to);
      }
    }
  }
  if (count != instance.n)
    throw Error(ErrorCode::Disconnected,
                std::to_string(instance.n - count) + " unreachable vertices");

  double total = std::accumulate(instance.demands.begin(),
                                 instance.demands.end(), 0.0);
  double scale = sum_abs(instance.demands);
  double tol = scale > 0.0 ? 1e-9 * scale : 1e-12;
  if (std::abs(total) > tol)
    throw Error(ErrorCode::ImproperDemands,
                "demands sum to " + std::to_string(total));
  return instance;
}

DistanceResult dijkstra(const Adjacency& adj, VertexId source) {
  const std::size_t n = adj.n();
  DistanceResult res;
  res.source = source;
  res.dist.assign(n, std::numeric_limits<double>::infinity());
  res.parent.assign(n, DistanceResult::no_parent);
  res.parent_edge.assign(n, static_cast<EdgeId>(-1));

  struct Item {
    double dist;
    VertexId v;
    bool operator>(const Item& o) const {
      if (dist != o.dist) return dist > o.dist;
      return v > o.v;
    }
  };
  std::priority_queue<Item, std::vector<Item>, std::greater<Item>> heap;
  std::vector<char> done(n, 0);
  res.dist[source] = 0.0;
  heap.push({0.0, source});
  while (!heap.empty()) {
    auto [d, u] = heap.top();
    heap.pop();
    if (done[u]) continue;
    done[u] = 1;
    for (const auto& arc : adj[u]) {
      double nd = d + arc.cost;
      if (nd < res.dist[arc.to]) {
        res.dist[arc.to] = nd;
        res.parent[arc.to] = u;
        res.parent_edge[arc.to] = arc.edge;
        heap.push({nd, arc.to});
      }
    }
  }
  return res;
}

DistanceResult dijkstra(const Instance& instance, VertexId source) {
  Adjacency adj(instance.n, instance.edges);
  return dijkstra(adj, source);
}

double compute_delta0(const Instance& instance) {
  DistanceResult sp = dijkstra(instance, 0);
  RankedDist best{-1.0, 0}, second{-1.0, 0};
  for (VertexId v = 0; v < instance.n; ++v) {
    RankedDist r{sp.dist[v], v};
    if (best < r) {
      second = best;
      best = r;
    } else if (second < r) {
      second = r;
    }
  }
  return best.dist + second.dist;
}

std::vector<double> net_outflow(const Instance& instance, const Flow& f) {
  std::vector<double> out(instance.n, 0.0);
  for (EdgeId e = 0; e < instance.edges.size(); ++e) {
    out[instance.edges[e].u] += f[e];
    out[instance.edges[e].v] -= f[e];
  }
  return out;
}

std::vector<double> residual(const Instance& instance,
                             const std::vector<double>& b, const Flow& f) {
  std::vector<double> r = net_outflow(instance, f);
  for (std::size_t v = 0; v < instance.n; ++v) r[v] = b[v] - r[v];
  return r;
}

double flow_cost(const Instance& instance, const Flow& f) {
  double c = 0.0;
  for (EdgeId e = 0; e < instance.edges.size(); ++e)
    c += instance.edges[e].cost * std::abs(f[e]);
  return c;
}

bool is_routing(const Instance& instance, const Flow& f,
                const std::vector<double>& b, double tol) {
  std::vector<double> r = residual(instance, b, f);
  double scale = sum_abs(b);
  double bound = scale > 0.0 ? tol * scale : 1e-12;
  for (double x : r)
    if (std::abs(x) > bound) return false;
  return true;
}

namespace {

struct UnionFind {
  std::vector<VertexId> parent;
  explicit UnionFind(std::size_t n) : parent(n) {
    for (std::size_t i = 0; i < n; ++i) parent[i] = static_cast<VertexId>(i);
  }
  VertexId find(VertexId x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  }
  bool unite(VertexId a, VertexId b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    if (b < a) std::swap(a, b);
    parent[b] = a;  // keep the smaller id as root
    return true;
  }
};

}  // namespace

Flow mst_route(const Instance& instance, const std::vector<double>& b) {
  const std::size_t n = instance.n;
  std::vector<EdgeId> order(instance.edges.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](EdgeId a, EdgeId c) {
    if (instance.edges[a].cost != instance.edges[c].cost)
      return instance.edges[a].cost < instance.edges[c].cost;
    return a < c;
  });

  UnionFind uf(n);
  std::vector<EdgeId> tree;
  tree.reserve(n - 1);
  for (EdgeId e : order) {
    if (uf.unite(instance.edges[e].u, instance.edges[e].v)) {
      tree.push_back(e);
      if (tree.size() == n - 1) break;
    }
  }
  assert(tree.size() == n - 1);

  // Root the tree at vertex 0 and push subtree demands toward the root.
  std::vector<std::vector<std::pair<VertexId, EdgeId>>> tadj(n);
  for (EdgeId e : tree) {
    tadj[instance.edges[e].u].push_back({instance.edges[e].v, e});
    tadj[instance.edges[e].v].push_back({instance.edges[e].u, e});
  }
  std::vector<VertexId> bfs{0};
  std::vector<VertexId> par(n, DistanceResult::no_parent);
  std::vector<EdgeId> par_edge(n, static_cast<EdgeId>(-1));
  std::vector<char> seen(n, 0);
  seen[0] = 1;
  for (std::size_t i = 0; i < bfs.size(); ++i) {
    VertexId u = bfs[i];
    for (auto [v, e] : tadj[u]) {
      if (!seen[v]) {
        seen[v] = 1;
        par[v] = u;
        par_edge[v] = e;
        bfs.push_back(v);
      }
    }
  }

  Flow f(instance.edges.size());
  std::vector<double> subtree(b);
  for (std::size_t i = bfs.size(); i-- > 1;) {
    VertexId v = bfs[i];
    EdgeId e = par_edge[v];
    // subtree[v] units leave the subtree of v through e toward par[v]
    if (instance.edges[e].u == v)
      f[e] += subtree[v];
    else
      f[e] -= subtree[v];
    subtree[par[v]] += subtree[v];
  }
  return f;
}

void add_path_flow(const Instance& instance, const DistanceResult& tree,
                   VertexId from, VertexId to, double amount, Flow& f) {
  if (from == to || amount == 0.0) return;
  // Walk the endpoint that is not the tree source up to the source, which
  // covers both orientations of the canonical path.
  VertexId walk;
  double sign;
  if (tree.source == from) {
    walk = to;
    sign = -1.0;  // path edges are traversed to -> from while walking up
  } else {
    assert(tree.source == to);
    walk = from;
    sign = 1.0;
  }
  while (walk != tree.source) {
    EdgeId e = tree.parent_edge[walk];
    VertexId p = tree.parent[walk];
    assert(e != static_cast<EdgeId>(-1));
    // Moving walk -> p adds `sign * amount` in that direction.
    if (instance.edges[e].u == walk)
      f[e] += sign * amount;
    else
      f[e] -= sign * amount;
    walk = p;
  }
}

}  // namespace tship
