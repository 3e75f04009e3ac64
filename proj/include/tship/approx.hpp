#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "tship/layers.hpp"
#include "tship/oracle.hpp"
#include "tship/types.hpp"

namespace tship {

// Column-sparse distribution matrix. Column v holds one value per bundle
// member of v, aligned with the member order of the layer's oracle, so the
// member identities live in the oracle and only masses are stored here.
struct DistMatrix {
  std::vector<std::size_t> col_ptr;  // per global node
  std::vector<double> value;

  std::span<const double> column(NodeId v) const {
    return {value.data() + col_ptr[v], col_ptr[v + 1] - col_ptr[v]};
  }
  std::size_t nnz() const { return value.size(); }
};

// Computes the distribution column of one layer vertex: a growing radius
// sweeps [0, delta], handing mass rate 1/delta to the members of the
// deepest piece already reached, split evenly among those within radius.
// Output is aligned with the oracle bundle order; members never reached
// keep mass zero.
void distribution_column(const OracleData& oracle, std::uint32_t v,
                         double delta, std::span<double> out);

// Sparsity pattern of the routing entries for one (child layer, parent
// layer) pair. Entries enumerate bundle(v) x bundle(p(v)) in nested order;
// pair_id maps each entry to a pattern-local row. Patterns are shared
// between blocks whose layer pair is an identical pair of minors.
struct RPattern {
  std::vector<std::size_t> col_ptr;                // per block column
  std::vector<std::uint32_t> pair_id;
  // pattern row -> (local w in child layer, local w' in parent layer)
  std::vector<std::pair<std::uint32_t, std::uint32_t>> pair_nodes;

  std::size_t rows() const { return pair_nodes.size(); }
  std::size_t nnz() const { return pair_id.size(); }
};

struct RBlock {
  std::int32_t child_layer = 0;
  std::int32_t parent_layer = 0;
  bool root = false;  // layer-0 block routing everything to s
  std::size_t row_base = 0;
  std::int32_t pattern = 0;
  double cost_factor = 0.0;               // diagonal cost for every row
  std::vector<std::uint32_t> cols;        // local child vertices covered
  std::vector<std::uint32_t> parent_local;  // aligned with cols
};

// Linear cost approximator built from the layer minors, the per-layer
// bundle oracles, the distribution matrix and the routing blocks. The
// aggregation matrix stays implicit behind tree sweeps over the laminar
// family.
class Approximator {
 public:
  static Approximator build(const Instance& instance);

  const Instance& instance() const { return instance_; }
  const LayerSequence& layers() const { return layers_; }
  const OraclePool& oracles() const { return oracles_; }
  const DistMatrix& distribution() const { return dist_; }
  const std::vector<RBlock>& blocks() const { return blocks_; }
  const RPattern& pattern(std::int32_t idx) const { return patterns_[idx]; }

  int level_count() const { return k_; }
  double harmonic() const { return harmonic_; }
  double alpha() const { return alpha_; }
  std::size_t row_count() const { return row_count_; }
  std::size_t routing_nnz() const;

  // Aggregate demands per supervertex, summed bottom-up over children.
  std::vector<double> aggregate(const std::vector<double>& b) const;
  // Transpose: per original vertex, the sum over all supervertices that
  // contain it.
  std::vector<double> aggregate_transpose(const std::vector<double>& y) const;

  void apply(const std::vector<double>& b, std::vector<double>& y) const;
  std::vector<double> apply(const std::vector<double>& b) const;
  std::vector<double> apply_transpose(const std::vector<double>& y) const;
  double apply_norm1(const std::vector<double>& b) const;

  // Sparse column of P for the demand vector chi_u - chi_v, as sorted
  // (row, value) pairs. This is the per-edge response used by the solver.
  void edge_column(VertexId u, VertexId v,
                   std::vector<std::pair<std::size_t, double>>& out) const;

  // Realizes the routing described by the matrix entries as an actual flow
  // along canonical shortest paths. Routes b exactly; costs at most
  // ||P b||_1.
  Flow flow_from_p(const std::vector<double>& b) const;

  double cost_entry(std::size_t row) const;  // diagonal of the cost matrix
  // Global (w, w') nodes of a row; intended for tests and diagnostics.
  std::pair<NodeId, NodeId> row_nodes(std::size_t row) const;

  // Bundle member of column v at position i within the column.
  NodeId column_member(NodeId v, std::size_t i) const;

 private:
  Instance instance_;
  LayerSequence layers_;
  OraclePool oracles_;
  DistMatrix dist_;
  std::vector<RPattern> patterns_;
  std::vector<RBlock> blocks_;
  // block and position holding each node as a column
  std::vector<std::int32_t> col_block_;
  std::vector<std::uint32_t> col_pos_;
  int k_ = 1;
  double harmonic_ = 0.0;
  double alpha_ = 0.0;
  std::size_t row_count_ = 0;

  std::span<const double> parent_column(const RBlock& block,
                                        std::size_t pos) const;
  void scatter_column_(std::size_t layer, std::uint32_t local, double coeff,
                       std::vector<std::pair<std::size_t, double>>& out) const;
};

double harmonic_number(std::size_t n);
double log2_real(std::size_t n);

}  // namespace tship
