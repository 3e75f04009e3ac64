#pragma once

#include <cstdint>
#include <limits>
#include <vector>

#include "tship/layers.hpp"
#include "tship/types.hpp"

namespace tship {

struct BundleMember {
  std::uint32_t w = 0;  // local supervertex in the same layer
  double dist = 0.0;    // in-layer distance from the bundle owner
};

// Deterministic sample hierarchy and bundles for one layer. Level sets
// shrink from S^0 = V down to S^k = {}; the piece of v at level j holds the
// S^j members strictly closer to v than the nearest S^{j+1} member, under
// the (distance, representative) tie order.
struct OracleData {
  int k = 0;
  std::size_t n = 0;
  std::vector<std::vector<std::uint32_t>> samples;  // S^0 .. S^{k-1}, sorted
  // pieces flattened: piece (v, j) = members[piece_offset[v*k+j] ..
  // piece_offset[v*k+j+1])
  std::vector<std::size_t> piece_offset;
  std::vector<BundleMember> members;

  std::size_t piece_begin(std::size_t v, int j) const {
    return piece_offset[v * k + j];
  }
  std::size_t piece_end(std::size_t v, int j) const {
    return piece_offset[v * k + j + 1];
  }
  std::size_t bundle_size(std::size_t v) const {
    return piece_offset[(v + 1) * k] - piece_offset[v * k];
  }
};

// Global level count: ceil(lg n) of the input graph, fixed across layers.
int oracle_level_count(std::size_t original_n);

// Builds samples greedily (hitting sets over nearest-sample balls) and the
// bundles on top of them. Throws DegenerateLayer for an empty layer.
OracleData build_oracle(const Layer& layer, int k);

// Bundles for caller-chosen samples; build_oracle delegates here once the
// hierarchy is fixed.
OracleData bundles_from_samples(const Layer& layer,
                                std::vector<std::vector<std::uint32_t>> samples,
                                int k);

// Oracles per layer with sharing between identical minors.
struct OraclePool {
  std::vector<OracleData> storage;
  std::vector<std::int32_t> index_of_layer;  // -1 for empty layers

  const OracleData* for_layer(std::size_t i) const {
    return index_of_layer[i] < 0 ? nullptr : &storage[index_of_layer[i]];
  }
};

OraclePool build_oracles(const LayerSequence& seq, int k);

constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace tship
