#pragma once

#include <cstdint>
#include <vector>

#include "tship/types.hpp"

namespace tship {

using NodeId = std::int32_t;
constexpr NodeId kNoNode = -1;

// One minor of the input graph together with its reach. Supervertices are
// indexed locally in increasing order of their representative.
struct Layer {
  int index = 0;
  double delta = 0.0;
  // representative (smallest original vertex id) per local supervertex
  std::vector<VertexId> rep;
  std::vector<Edge> edges;  // endpoints are local indices, costs from G
  // original vertex -> local supervertex, -1 when absent from this layer
  std::vector<std::int32_t> vertex_of_original;
  NodeId node_base = 0;  // global id of local vertex 0
  // counts of input edges with cost <= delta/n and <= 2*delta; two layers
  // with equal signatures are identical minors
  std::size_t sig_lo = 0, sig_hi = 0;

  std::size_t n() const { return rep.size(); }
  std::size_t m() const { return edges.size(); }
  NodeId node_of(std::size_t local) const {
    return node_base + static_cast<NodeId>(local);
  }
};

// Layer minors plus the laminar contraction family over all supervertices.
// Global node ids enumerate supervertices layer by layer.
struct LayerSequence {
  std::vector<Layer> layers;
  std::size_t original_n = 0;

  // family arrays indexed by global node id
  std::vector<VertexId> node_rep;
  std::vector<std::int32_t> node_layer;
  std::vector<std::uint32_t> node_local;
  std::vector<std::uint32_t> node_set_size;  // |V(v)|
  std::vector<NodeId> parent;
  std::vector<std::size_t> children_offset;
  std::vector<NodeId> children;
  std::vector<NodeId> leaf_of_original;  // the singleton leaf holding v
  NodeId root_node = kNoNode;            // supervertex of V_0 containing vertex 0

  std::size_t last_index() const { return layers.size() - 1; }
  std::size_t node_count() const { return node_rep.size(); }
  bool is_leaf(NodeId v) const {
    return children_offset[v] == children_offset[v + 1];
  }
  std::vector<NodeId> children_of(NodeId v) const {
    return {children.begin() + children_offset[v],
            children.begin() + children_offset[v + 1]};
  }
  // Expands V(v) by walking the original vertices; intended for tests and
  // small instances.
  std::vector<VertexId> member_set(NodeId v) const;
};

// Builds the full minor sequence. The reach halves while the current layer
// has edges; once it runs out, the reach jumps to c * n / 2 for the
// costliest still-contracted edge, and the sequence ends when none is left.
LayerSequence build_layers(const Instance& instance);

VertexId representative(const LayerSequence& seq, NodeId v);

}  // namespace tship
