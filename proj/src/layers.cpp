#include "tship/layers.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <numeric>
#include <unordered_map>

#include "tship/graph.hpp"

namespace tship {

std::vector<VertexId> LayerSequence::member_set(NodeId v) const {
  const Layer& layer = layers[node_layer[v]];
  std::vector<VertexId> out;
  for (VertexId u = 0; u < original_n; ++u)
    if (layer.vertex_of_original[u] ==
        static_cast<std::int32_t>(node_local[v]))
      out.push_back(u);
  return out;
}

namespace {

struct MinIdUnionFind {
  std::vector<VertexId> parent;
  explicit MinIdUnionFind(std::size_t n) : parent(n) {
    std::iota(parent.begin(), parent.end(), 0);
  }
  VertexId find(VertexId x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  }
  void unite(VertexId a, VertexId b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (b < a) std::swap(a, b);
    parent[b] = a;  // root keeps the minimum id, so find() yields the rep
  }
};

}  // namespace

LayerSequence build_layers(const Instance& instance) {
  const std::size_t n = instance.n;
  const double nd = static_cast<double>(n);

  // Edge ids sorted by (cost, id); thresholds become prefix lengths.
  std::vector<EdgeId> order(instance.edges.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](EdgeId a, EdgeId b) {
    if (instance.edges[a].cost != instance.edges[b].cost)
      return instance.edges[a].cost < instance.edges[b].cost;
    return a < b;
  });
  std::vector<double> sorted_cost(order.size());
  for (std::size_t i = 0; i < order.size(); ++i)
    sorted_cost[i] = instance.edges[order[i]].cost;
  auto count_at_most = [&](double t) {
    return static_cast<std::size_t>(
        std::upper_bound(sorted_cost.begin(), sorted_cost.end(), t) -
        sorted_cost.begin());
  };

  LayerSequence seq;
  seq.original_n = n;

  double delta = compute_delta0(instance);
  int index = 0;
  while (true) {
    std::size_t lo = count_at_most(delta / nd);
    std::size_t hi = count_at_most(2.0 * delta);

    MinIdUnionFind uf(n);
    for (std::size_t i = 0; i < lo; ++i) {
      const Edge& e = instance.edges[order[i]];
      uf.unite(e.u, e.v);
    }

    // A component stays in the layer only if some kept edge leaves it.
    std::vector<char> has_edge(n, 0);
    for (std::size_t i = lo; i < hi; ++i) {
      const Edge& e = instance.edges[order[i]];
      VertexId a = uf.find(e.u), b = uf.find(e.v);
      if (a != b) {
        has_edge[a] = 1;
        has_edge[b] = 1;
      }
    }

    Layer layer;
    layer.index = index;
    layer.delta = delta;
    layer.sig_lo = lo;
    layer.sig_hi = hi;
    layer.vertex_of_original.assign(n, -1);
    layer.node_base = static_cast<NodeId>(seq.node_count());

    std::vector<std::int32_t> local_of_root(n, -1);
    for (VertexId v = 0; v < n; ++v) {
      VertexId r = uf.find(v);
      if (has_edge[r] && local_of_root[r] < 0) {
        // roots are minimum ids, so scanning v in order yields reps sorted
        local_of_root[r] = static_cast<std::int32_t>(layer.rep.size());
        layer.rep.push_back(r);
      }
    }
    if (layer.rep.empty() && index == 0) {
      // All edges contracted: a connected input collapses to exactly one
      // supervertex, kept so the root layer is never empty.
      assert(uf.find(static_cast<VertexId>(n - 1)) == uf.find(0));
      local_of_root[uf.find(0)] = 0;
      layer.rep.push_back(uf.find(0));
    }
    assert(index > 0 || !layer.rep.empty());

    for (VertexId v = 0; v < n; ++v) {
      std::int32_t loc = local_of_root[uf.find(v)];
      layer.vertex_of_original[v] = loc;
    }

    // Kept edges in (cost, id) order; the first edge seen per supervertex
    // pair is the minimum-cost representative.
    std::unordered_map<std::uint64_t, std::uint32_t> edge_slot;
    edge_slot.reserve((hi - lo) * 2);
    for (std::size_t i = lo; i < hi; ++i) {
      const Edge& e = instance.edges[order[i]];
      std::int32_t a = layer.vertex_of_original[e.u];
      std::int32_t b = layer.vertex_of_original[e.v];
      if (a < 0 || b < 0 || a == b) continue;
      if (b < a) std::swap(a, b);
      std::uint64_t key = (static_cast<std::uint64_t>(a) << 32) |
                          static_cast<std::uint32_t>(b);
      if (edge_slot.emplace(key, layer.edges.size()).second)
        layer.edges.push_back({static_cast<VertexId>(a),
                               static_cast<VertexId>(b), e.cost});
    }
    std::sort(layer.edges.begin(), layer.edges.end(),
              [](const Edge& a, const Edge& b) {
                return a.u != b.u ? a.u < b.u : a.v < b.v;
              });

    for (std::size_t local = 0; local < layer.rep.size(); ++local) {
      seq.node_rep.push_back(layer.rep[local]);
      seq.node_layer.push_back(index);
      seq.node_local.push_back(static_cast<std::uint32_t>(local));
    }
    bool has_edges = !layer.edges.empty();
    seq.layers.push_back(std::move(layer));

    if (has_edges) {
      delta = delta / 2.0;
    } else if (lo > 0) {
      // Jump to the scale of the costliest contracted edge. The clamp keeps
      // the halving invariant exact under rounding.
      delta = std::min(sorted_cost[lo - 1] * (nd / 2.0), delta / 2.0);
    } else {
      break;
    }
    ++index;
  }

  // Parents: deepest earlier layer whose partition still holds the rep.
  const std::size_t total = seq.node_count();
  seq.parent.assign(total, kNoNode);
  seq.node_set_size.assign(total, 0);
  for (NodeId v = 0; v < static_cast<NodeId>(total); ++v) {
    int li = seq.node_layer[v];
    VertexId r = seq.node_rep[v];
    for (int i = li - 1; i >= 0; --i) {
      std::int32_t loc = seq.layers[i].vertex_of_original[r];
      if (loc >= 0) {
        seq.parent[v] = seq.layers[i].node_of(loc);
        break;
      }
    }
    assert(li == 0 || seq.parent[v] != kNoNode);
  }
  for (const Layer& layer : seq.layers) {
    std::vector<std::uint32_t> count(layer.n(), 0);
    for (VertexId u = 0; u < n; ++u)
      if (layer.vertex_of_original[u] >= 0)
        ++count[layer.vertex_of_original[u]];
    for (std::size_t local = 0; local < layer.n(); ++local)
      seq.node_set_size[layer.node_of(local)] = count[local];
  }

  seq.children_offset.assign(total + 1, 0);
  for (NodeId v = 0; v < static_cast<NodeId>(total); ++v)
    if (seq.parent[v] != kNoNode) ++seq.children_offset[seq.parent[v] + 1];
  for (std::size_t i = 1; i <= total; ++i)
    seq.children_offset[i] += seq.children_offset[i - 1];
  seq.children.resize(seq.children_offset.back());
  {
    std::vector<std::size_t> cursor(seq.children_offset.begin(),
                                    seq.children_offset.end() - 1);
    for (NodeId v = 0; v < static_cast<NodeId>(total); ++v)
      if (seq.parent[v] != kNoNode) seq.children[cursor[seq.parent[v]]++] = v;
  }

  // Each original vertex ends in a singleton leaf: its deepest appearance.
  seq.leaf_of_original.assign(n, kNoNode);
  for (VertexId u = 0; u < n; ++u) {
    for (std::size_t i = seq.layers.size(); i-- > 0;) {
      std::int32_t loc = seq.layers[i].vertex_of_original[u];
      if (loc >= 0) {
        NodeId leaf = seq.layers[i].node_of(loc);
        assert(seq.is_leaf(leaf));
        assert(seq.node_set_size[leaf] == 1);
        seq.leaf_of_original[u] = leaf;
        break;
      }
    }
    assert(seq.leaf_of_original[u] != kNoNode);
  }

  assert(seq.layers[0].vertex_of_original[0] >= 0);
  seq.root_node = seq.layers[0].node_of(seq.layers[0].vertex_of_original[0]);
  return seq;
}

VertexId representative(const LayerSequence& seq, NodeId v) {
  return seq.node_rep[v];
}

}  // namespace tship
