#include "tship/approx.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <map>
#include <unordered_map>

#include "tship/graph.hpp"

namespace tship {

double harmonic_number(std::size_t n) {
  double h = 0.0;
  for (std::size_t q = 1; q <= n; ++q) h += 1.0 / static_cast<double>(q);
  return h;
}

double log2_real(std::size_t n) {
  return std::log2(static_cast<double>(n));
}

void distribution_column(const OracleData& oracle, std::uint32_t v,
                         double delta, std::span<double> out) {
  const int k = oracle.k;
  std::size_t base = oracle.piece_begin(v, 0);
  assert(out.size() == oracle.bundle_size(v));
  std::fill(out.begin(), out.end(), 0.0);

  // Radius at which each level takes over: the nearest member of the next
  // nonempty piece. Empty pieces never become the active level, so they are
  // skipped both as contributors and as takeover points.
  std::vector<double> takeover(k + 1, kInf);
  for (int j = k; j-- > 0;) {
    takeover[j] = takeover[j + 1];
    std::size_t pb = oracle.piece_begin(v, j);
    if (pb != oracle.piece_end(v, j))
      takeover[j] = oracle.members[pb].dist;
  }

  for (int j = 0; j < k; ++j) {
    std::size_t pb = oracle.piece_begin(v, j);
    std::size_t pe = oracle.piece_end(v, j);
    if (pb == pe) continue;

    double lambda_plus = std::min(takeover[j + 1], delta);

    // retained members: distance at most lambda_plus
    std::size_t r = 0;
    while (pb + r < pe && oracle.members[pb + r].dist <= lambda_plus) ++r;
    if (r == 0) continue;

    // suffix sums of the per-interval shares
    double acc = (lambda_plus - oracle.members[pb + r - 1].dist) /
                 (static_cast<double>(r) * delta);
    out[pb + r - 1 - base] = acc;
    for (std::size_t t = r - 1; t-- > 0;) {
      acc += (oracle.members[pb + t + 1].dist - oracle.members[pb + t].dist) /
             (static_cast<double>(t + 1) * delta);
      out[pb + t - base] = acc;
    }
  }
}

namespace {

struct PairKeyHash {
  std::size_t operator()(std::uint64_t x) const {
    x ^= x >> 33;
    x *= 0xff51afd7ed558ccdULL;
    x ^= x >> 33;
    return static_cast<std::size_t>(x);
  }
};

RPattern build_pattern(const LayerSequence& seq, const OraclePool& oracles,
                       const RBlock& block) {
  const Layer& child = seq.layers[block.child_layer];
  const OracleData& child_oracle =
      *oracles.for_layer(static_cast<std::size_t>(block.child_layer));
  const OracleData* parent_oracle =
      block.root ? nullptr
                 : oracles.for_layer(static_cast<std::size_t>(block.parent_layer));

  RPattern pattern;
  pattern.col_ptr.assign(block.cols.size() + 1, 0);
  std::unordered_map<std::uint64_t, std::uint32_t, PairKeyHash> pair_index;
  std::size_t nnz_estimate = 0;
  for (std::uint32_t v : block.cols) nnz_estimate += child_oracle.bundle_size(v);
  pair_index.reserve(nnz_estimate);
  pattern.pair_id.reserve(nnz_estimate);

  for (std::size_t pos = 0; pos < block.cols.size(); ++pos) {
    std::uint32_t v = block.cols[pos];
    std::size_t cb = child_oracle.piece_begin(v, 0);
    std::size_t ce = child_oracle.piece_end(v, child_oracle.k - 1);
    std::uint32_t p = block.parent_local[pos];
    std::size_t qb = 0, qe = 1;
    if (!block.root) {
      qb = parent_oracle->piece_begin(p, 0);
      qe = parent_oracle->piece_end(p, parent_oracle->k - 1);
    }
    for (std::size_t ci = cb; ci < ce; ++ci) {
      std::uint32_t w = child_oracle.members[ci].w;
      for (std::size_t qi = qb; qi < qe; ++qi) {
        std::uint32_t wp = block.root ? p : parent_oracle->members[qi].w;
        std::uint64_t key =
            (static_cast<std::uint64_t>(w) << 32) | wp;
        auto [it, inserted] = pair_index.emplace(
            key, static_cast<std::uint32_t>(pattern.pair_nodes.size()));
        if (inserted) pattern.pair_nodes.push_back({w, wp});
        pattern.pair_id.push_back(it->second);
      }
    }
    pattern.col_ptr[pos + 1] = pattern.pair_id.size();
  }
  return pattern;
}

}  // namespace

Approximator Approximator::build(const Instance& instance) {
  Approximator apx;
  apx.instance_ = validate(instance);
  apx.layers_ = build_layers(apx.instance_);
  apx.k_ = oracle_level_count(instance.n);
  apx.oracles_ = build_oracles(apx.layers_, apx.k_);
  apx.harmonic_ = harmonic_number(instance.n);
  double lg = log2_real(instance.n);
  apx.alpha_ = 180.0 * apx.harmonic_ * lg * lg;

  const LayerSequence& seq = apx.layers_;

  // distribution columns, layer by layer
  apx.dist_.col_ptr.assign(seq.node_count() + 1, 0);
  for (std::size_t i = 0; i < seq.layers.size(); ++i) {
    const Layer& layer = seq.layers[i];
    const OracleData* oracle = apx.oracles_.for_layer(i);
    for (std::size_t local = 0; local < layer.n(); ++local)
      apx.dist_.col_ptr[layer.node_of(local) + 1] = oracle->bundle_size(local);
  }
  for (std::size_t i = 1; i <= seq.node_count(); ++i)
    apx.dist_.col_ptr[i] += apx.dist_.col_ptr[i - 1];
  apx.dist_.value.assign(apx.dist_.col_ptr.back(), 0.0);
  for (std::size_t i = 0; i < seq.layers.size(); ++i) {
    const Layer& layer = seq.layers[i];
    const OracleData* oracle = apx.oracles_.for_layer(i);
    for (std::size_t local = 0; local < layer.n(); ++local) {
      NodeId node = layer.node_of(local);
      std::span<double> col{apx.dist_.value.data() + apx.dist_.col_ptr[node],
                            apx.dist_.col_ptr[node + 1] -
                                apx.dist_.col_ptr[node]};
      distribution_column(*oracle, static_cast<std::uint32_t>(local),
                          layer.delta, col);
    }
  }

  // routing blocks grouped by (child layer, parent layer)
  std::map<std::pair<std::size_t, std::size_t>, std::int32_t> pattern_cache;
  for (std::size_t i = 0; i < seq.layers.size(); ++i) {
    const Layer& layer = seq.layers[i];
    if (layer.n() == 0) continue;
    std::map<std::int32_t, RBlock> groups;
    if (i == 0) {
      RBlock& blk = groups[0];
      blk.child_layer = 0;
      blk.parent_layer = 0;
      blk.root = true;
      std::uint32_t s_local = seq.node_local[seq.root_node];
      for (std::uint32_t local = 0; local < layer.n(); ++local) {
        blk.cols.push_back(local);
        blk.parent_local.push_back(s_local);
      }
    } else {
      for (std::uint32_t local = 0; local < layer.n(); ++local) {
        NodeId p = seq.parent[layer.node_of(local)];
        std::int32_t pl = seq.node_layer[p];
        RBlock& blk = groups[pl];
        if (blk.cols.empty()) {
          blk.child_layer = static_cast<std::int32_t>(i);
          blk.parent_layer = pl;
        }
        blk.cols.push_back(local);
        blk.parent_local.push_back(seq.node_local[p]);
      }
    }
    for (auto& [pl, blk] : groups) {
      double child_delta = layer.delta;
      double parent_delta = seq.layers[pl].delta;
      if (blk.root) {
        blk.cost_factor = 2.0 * child_delta;
      } else if (parent_delta == 2.0 * child_delta) {
        blk.cost_factor = 3.0 * parent_delta;
      } else {
        assert(parent_delta > 2.0 * child_delta);
        blk.cost_factor = 2.0 * child_delta;
      }

      bool whole_layer = blk.cols.size() == layer.n();
      std::int32_t pat = -1;
      auto key = std::make_pair(
          layer.sig_lo ^ (layer.sig_hi << 20),
          seq.layers[pl].sig_lo ^ (seq.layers[pl].sig_hi << 20));
      if (whole_layer && !blk.root) {
        auto it = pattern_cache.find(key);
        if (it != pattern_cache.end()) pat = it->second;
      }
      if (pat < 0) {
        pat = static_cast<std::int32_t>(apx.patterns_.size());
        apx.patterns_.push_back(build_pattern(seq, apx.oracles_, blk));
        if (whole_layer && !blk.root) pattern_cache.emplace(key, pat);
      }
      blk.pattern = pat;
      blk.row_base = apx.row_count_;
      apx.row_count_ += apx.patterns_[pat].rows();
      apx.blocks_.push_back(std::move(blk));
    }
  }

  apx.col_block_.assign(seq.node_count(), -1);
  apx.col_pos_.assign(seq.node_count(), 0);
  for (std::size_t bi = 0; bi < apx.blocks_.size(); ++bi) {
    const RBlock& blk = apx.blocks_[bi];
    const Layer& layer = seq.layers[blk.child_layer];
    for (std::size_t pos = 0; pos < blk.cols.size(); ++pos) {
      NodeId node = layer.node_of(blk.cols[pos]);
      apx.col_block_[node] = static_cast<std::int32_t>(bi);
      apx.col_pos_[node] = static_cast<std::uint32_t>(pos);
    }
  }
  return apx;
}

void Approximator::scatter_column_(
    std::size_t layer_index, std::uint32_t local, double coeff,
    std::vector<std::pair<std::size_t, double>>& out) const {
  const Layer& layer = layers_.layers[layer_index];
  NodeId node = layer.node_of(local);
  const RBlock& blk = blocks_[col_block_[node]];
  const RPattern& pat = patterns_[blk.pattern];
  std::size_t pos = col_pos_[node];
  std::span<const double> dc = dist_.column(node);
  std::span<const double> pc = parent_column(blk, pos);
  const std::uint32_t* ids = pat.pair_id.data() + pat.col_ptr[pos];
  double cf = coeff * blk.cost_factor;
  std::size_t t = 0;
  for (double cv : dc) {
    double x = cv * cf;
    for (double pv : pc) out.push_back({blk.row_base + ids[t++], x * pv});
  }
}

std::size_t Approximator::routing_nnz() const {
  std::size_t total = 0;
  for (const RBlock& blk : blocks_) total += patterns_[blk.pattern].nnz();
  return total;
}

std::span<const double> Approximator::parent_column(const RBlock& block,
                                                    std::size_t pos) const {
  static constexpr double kUnit = 1.0;
  if (block.root) return {&kUnit, 1};
  const Layer& player = layers_.layers[block.parent_layer];
  return dist_.column(player.node_of(block.parent_local[pos]));
}

std::vector<double> Approximator::aggregate(const std::vector<double>& b) const {
  const LayerSequence& seq = layers_;
  std::vector<double> agg(seq.node_count(), 0.0);
  for (NodeId v = static_cast<NodeId>(seq.node_count()); v-- > 0;) {
    if (seq.is_leaf(v)) {
      agg[v] = b[seq.node_rep[v]];
    } else {
      double s = 0.0;
      for (std::size_t c = seq.children_offset[v]; c < seq.children_offset[v + 1];
           ++c)
        s += agg[seq.children[c]];
      agg[v] = s;
    }
  }
  return agg;
}

std::vector<double> Approximator::aggregate_transpose(
    const std::vector<double>& y) const {
  const LayerSequence& seq = layers_;
  std::vector<double> chain(seq.node_count(), 0.0);
  for (NodeId v = 0; v < static_cast<NodeId>(seq.node_count()); ++v) {
    chain[v] = y[v];
    if (seq.parent[v] != kNoNode) chain[v] += chain[seq.parent[v]];
  }
  std::vector<double> out(seq.original_n, 0.0);
  for (VertexId u = 0; u < seq.original_n; ++u)
    out[u] = chain[seq.leaf_of_original[u]];
  return out;
}

void Approximator::apply(const std::vector<double>& b,
                         std::vector<double>& y) const {
  std::vector<double> agg = aggregate(b);
  y.assign(row_count_, 0.0);
  for (const RBlock& blk : blocks_) {
    const RPattern& pat = patterns_[blk.pattern];
    const Layer& layer = layers_.layers[blk.child_layer];
    double* yb = y.data() + blk.row_base;
    for (std::size_t pos = 0; pos < blk.cols.size(); ++pos) {
      double a = agg[layer.node_of(blk.cols[pos])];
      if (a == 0.0) continue;
      std::span<const double> dc = dist_.column(layer.node_of(blk.cols[pos]));
      std::span<const double> pc = parent_column(blk, pos);
      const std::uint32_t* ids = pat.pair_id.data() + pat.col_ptr[pos];
      double af = a * blk.cost_factor;
      std::size_t t = 0;
      for (double cv : dc) {
        double x = cv * af;
        for (double pv : pc) yb[ids[t++]] += x * pv;
      }
    }
  }
}

std::vector<double> Approximator::apply(const std::vector<double>& b) const {
  std::vector<double> y;
  apply(b, y);
  return y;
}

double Approximator::apply_norm1(const std::vector<double>& b) const {
  std::vector<double> y;
  apply(b, y);
  return sum_abs(y);
}

std::vector<double> Approximator::apply_transpose(
    const std::vector<double>& y) const {
  std::vector<double> t_nodes(layers_.node_count(), 0.0);
  for (const RBlock& blk : blocks_) {
    const RPattern& pat = patterns_[blk.pattern];
    const Layer& layer = layers_.layers[blk.child_layer];
    const double* yb = y.data() + blk.row_base;
    for (std::size_t pos = 0; pos < blk.cols.size(); ++pos) {
      std::span<const double> dc = dist_.column(layer.node_of(blk.cols[pos]));
      std::span<const double> pc = parent_column(blk, pos);
      const std::uint32_t* ids = pat.pair_id.data() + pat.col_ptr[pos];
      double s = 0.0;
      std::size_t t = 0;
      for (double cv : dc) {
        double inner = 0.0;
        for (double pv : pc) inner += pv * yb[ids[t++]];
        s += cv * inner;
      }
      t_nodes[layer.node_of(blk.cols[pos])] += blk.cost_factor * s;
    }
  }
  return aggregate_transpose(t_nodes);
}

void Approximator::edge_column(
    VertexId u, VertexId v,
    std::vector<std::pair<std::size_t, double>>& out) const {
  out.clear();
  const LayerSequence& seq = layers_;
  // The aggregate of chi_u - chi_v is +1 on nodes containing u only, -1 on
  // nodes containing v only; shared ancestors cancel exactly.
  for (std::size_t i = 0; i < seq.layers.size(); ++i) {
    const Layer& layer = seq.layers[i];
    if (layer.n() == 0) continue;
    std::int32_t lu = layer.vertex_of_original[u];
    std::int32_t lv = layer.vertex_of_original[v];
    if (lu == lv) continue;  // includes both-absent and same supervertex
    if (lu >= 0) scatter_column_(i, static_cast<std::uint32_t>(lu), 1.0, out);
    if (lv >= 0) scatter_column_(i, static_cast<std::uint32_t>(lv), -1.0, out);
  }
  std::sort(out.begin(), out.end());
  // merge duplicate rows
  std::size_t w = 0;
  for (std::size_t r = 0; r < out.size();) {
    std::size_t row = out[r].first;
    double s = 0.0;
    while (r < out.size() && out[r].first == row) s += out[r++].second;
    out[w++] = {row, s};
  }
  out.resize(w);
}

Flow Approximator::flow_from_p(const std::vector<double>& b) const {
  std::vector<double> agg = aggregate(b);
  Flow f(instance_.m());

  std::size_t max_rows = 0;
  for (const RPattern& pat : patterns_) max_rows = std::max(max_rows, pat.rows());
  std::vector<double> rowsum(max_rows);

  // canonical root -> (from, to, amount)
  std::map<VertexId, std::vector<std::tuple<VertexId, VertexId, double>>> paths;
  for (const RBlock& blk : blocks_) {
    const RPattern& pat = patterns_[blk.pattern];
    const Layer& child = layers_.layers[blk.child_layer];
    const Layer& parent = layers_.layers[blk.parent_layer];
    std::fill(rowsum.begin(), rowsum.begin() + pat.rows(), 0.0);
    for (std::size_t pos = 0; pos < blk.cols.size(); ++pos) {
      double a = agg[child.node_of(blk.cols[pos])];
      if (a == 0.0) continue;
      std::span<const double> dc = dist_.column(child.node_of(blk.cols[pos]));
      std::span<const double> pc = parent_column(blk, pos);
      const std::uint32_t* ids = pat.pair_id.data() + pat.col_ptr[pos];
      std::size_t t = 0;
      for (double cv : dc) {
        double x = cv * a;
        for (double pv : pc) rowsum[ids[t++]] += x * pv;
      }
    }
    for (std::size_t r = 0; r < pat.rows(); ++r) {
      double amount = rowsum[r];
      if (amount == 0.0) continue;
      VertexId from = child.rep[pat.pair_nodes[r].first];
      VertexId to = parent.rep[pat.pair_nodes[r].second];
      if (from == to) continue;
      paths[std::min(from, to)].push_back({from, to, amount});
    }
  }

  for (const auto& [root, triples] : paths) {
    DistanceResult tree = dijkstra(instance_, root);
    for (const auto& [from, to, amount] : triples)
      add_path_flow(instance_, tree, from, to, amount, f);
  }
  return f;
}

double Approximator::cost_entry(std::size_t row) const {
  for (const RBlock& blk : blocks_) {
    if (row >= blk.row_base &&
        row < blk.row_base + patterns_[blk.pattern].rows())
      return blk.cost_factor;
  }
  return 0.0;
}

std::pair<NodeId, NodeId> Approximator::row_nodes(std::size_t row) const {
  for (const RBlock& blk : blocks_) {
    const RPattern& pat = patterns_[blk.pattern];
    if (row < blk.row_base || row >= blk.row_base + pat.rows()) continue;
    auto [w, wp] = pat.pair_nodes[row - blk.row_base];
    return {layers_.layers[blk.child_layer].node_of(w),
            layers_.layers[blk.parent_layer].node_of(wp)};
  }
  return {kNoNode, kNoNode};
}

NodeId Approximator::column_member(NodeId v, std::size_t i) const {
  const Layer& layer = layers_.layers[layers_.node_layer[v]];
  const OracleData* oracle = oracles_.for_layer(layers_.node_layer[v]);
  std::size_t base = oracle->piece_begin(layers_.node_local[v], 0);
  return layer.node_of(oracle->members[base + i].w);
}

}  // namespace tship
