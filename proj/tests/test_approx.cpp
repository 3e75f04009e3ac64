#include "doctest.h"

#include <cmath>
#include <map>
#include <numeric>

#include "reference.hpp"
#include "tship/approx.hpp"
#include "tship/exact.hpp"
#include "tship/graph.hpp"
#include "tship/io.hpp"

using namespace tship;

namespace {

Layer whole_graph_layer(const Instance& g, double delta) {
  Layer layer;
  layer.index = 0;
  layer.delta = delta;
  layer.rep.resize(g.n);
  for (VertexId v = 0; v < g.n; ++v) layer.rep[v] = v;
  layer.edges = g.edges;
  layer.vertex_of_original.resize(g.n);
  for (VertexId v = 0; v < g.n; ++v)
    layer.vertex_of_original[v] = static_cast<std::int32_t>(v);
  return layer;
}

// Two small clusters joined by one expensive edge; exercises reach jumps,
// far parents and disconnected layers.
Instance dumbbell() {
  Instance g;
  g.n = 4;
  g.edges = {{0, 1, 1.0}, {2, 3, 1.0}, {1, 2, 1e6}};
  g.demands.assign(4, 0.0);
  return g;
}

// Dense distribution column over the local vertices of one layer.
std::vector<double> dense_column(const Approximator& apx, std::size_t layer_idx,
                                 std::uint32_t local) {
  const Layer& layer = apx.layers().layers[layer_idx];
  const OracleData* oracle = apx.oracles().for_layer(layer_idx);
  std::vector<double> out(layer.n(), 0.0);
  std::span<const double> col = apx.distribution().column(layer.node_of(local));
  std::size_t base = oracle->piece_begin(local, 0);
  for (std::size_t i = 0; i < col.size(); ++i)
    out[oracle->members[base + i].w] += col[i];
  return out;
}

std::vector<Instance> corpus() { return ref::seed_corpus(); }

}  // namespace

TEST_CASE("distribution column on the forced path example") {
  Instance g = make_path(4);
  Layer layer = whole_graph_layer(g, 2.0);
  OracleData o = bundles_from_samples(layer, {{0, 1, 2, 3}, {2}}, 2);

  std::vector<double> col(o.bundle_size(0), 0.0);
  distribution_column(o, 0, 2.0, col);
  REQUIRE(col.size() == 3);
  CHECK(col[0] == doctest::Approx(0.75).epsilon(1e-15));  // vertex 1 itself
  CHECK(col[1] == doctest::Approx(0.25).epsilon(1e-15));  // neighbor
  CHECK(col[2] == doctest::Approx(0.0).epsilon(1e-15));   // sampled vertex
  CHECK(std::accumulate(col.begin(), col.end(), 0.0) ==
        doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("distribution column matches the radius-sweep reference") {
  for (std::uint64_t seed : {1, 3, 6}) {
    Instance g = make_random(30, seed);
    LayerSequence seq = build_layers(g);
    int k = oracle_level_count(g.n);
    for (const Layer& layer : seq.layers) {
      if (layer.n() == 0) continue;
      OracleData o = build_oracle(layer, k);
      for (std::uint32_t v = 0; v < layer.n(); ++v) {
        std::vector<double> closed(o.bundle_size(v), 0.0);
        distribution_column(o, v, layer.delta, closed);
        std::vector<double> swept = ref::sweep_distribution(o, v, layer.delta);
        REQUIRE(closed.size() == swept.size());
        for (std::size_t i = 0; i < closed.size(); ++i)
          CHECK(closed[i] == doctest::Approx(swept[i]).epsilon(1e-6));
      }
    }
  }
}

TEST_CASE("the root supervertex keeps all of its own mass") {
  Approximator apx = Approximator::build(make_path(4));
  NodeId root = apx.layers().root_node;
  std::span<const double> col = apx.distribution().column(root);
  REQUIRE(col.size() == 1);
  CHECK(col[0] == 1.0);
}

TEST_CASE("distribution columns are stochastic") {
  for (const Instance& g : corpus()) {
    Approximator apx = Approximator::build(g);
    for (NodeId v = 0; v < static_cast<NodeId>(apx.layers().node_count()); ++v) {
      double s = 0.0;
      for (double x : apx.distribution().column(v)) s += x;
      CHECK(std::abs(s - 1.0) <= 1e-12);
      for (double x : apx.distribution().column(v)) CHECK(x >= 0.0);
    }
  }
}

TEST_CASE("routing columns are stochastic and bounded by bundle products") {
  for (const Instance& g : corpus()) {
    Approximator apx = Approximator::build(g);
    const LayerSequence& seq = apx.layers();
    for (const RBlock& blk : apx.blocks()) {
      const RPattern& pat = apx.pattern(blk.pattern);
      const Layer& layer = seq.layers[blk.child_layer];
      for (std::size_t pos = 0; pos < blk.cols.size(); ++pos) {
        std::span<const double> dc =
            apx.distribution().column(layer.node_of(blk.cols[pos]));
        std::span<const double> pc{&dc[0], 0};
        double psum = 1.0;
        std::size_t psize = 1;
        if (!blk.root) {
          const Layer& player = seq.layers[blk.parent_layer];
          pc = apx.distribution().column(player.node_of(blk.parent_local[pos]));
          psum = 0.0;
          for (double x : pc) psum += x;
          psize = pc.size();
        }
        double csum = 0.0;
        for (double x : dc) csum += x;
        CHECK(std::abs(csum * psum - 1.0) <= 1e-12);
        CHECK(pat.col_ptr[pos + 1] - pat.col_ptr[pos] == dc.size() * psize);
      }
    }
  }
}

TEST_CASE("cost entries follow the reach cases") {
  Approximator path_apx = Approximator::build(make_path(4));
  const LayerSequence& pseq = path_apx.layers();
  bool saw_root = false, saw_adjacent = false;
  for (const RBlock& blk : path_apx.blocks()) {
    if (blk.root) {
      CHECK(blk.cost_factor == 2.0 * pseq.layers[0].delta);
      CHECK(blk.cost_factor == 10.0);
      saw_root = true;
    } else if (pseq.layers[blk.parent_layer].delta ==
               2.0 * pseq.layers[blk.child_layer].delta) {
      CHECK(blk.cost_factor == 6.0 * pseq.layers[blk.child_layer].delta);
      saw_adjacent = true;
    }
  }
  CHECK(saw_root);
  CHECK(saw_adjacent);

  Approximator far_apx = Approximator::build(dumbbell());
  const LayerSequence& fseq = far_apx.layers();
  bool saw_far = false;
  for (const RBlock& blk : far_apx.blocks()) {
    if (blk.root) continue;
    double pd = fseq.layers[blk.parent_layer].delta;
    double cd = fseq.layers[blk.child_layer].delta;
    if (pd > 2.0 * cd) {
      CHECK(blk.cost_factor == 2.0 * cd);
      saw_far = true;
    }
  }
  CHECK(saw_far);

  // diagonal support matches the row space
  Approximator small = Approximator::build(make_path(4));
  for (std::size_t row = 0; row < small.row_count(); ++row)
    CHECK(small.cost_entry(row) > 0.0);
}

TEST_CASE("aggregation sums member demands") {
  for (std::uint64_t seed : {2, 8}) {
    Instance g = make_random(24, seed);
    Approximator apx = Approximator::build(g);
    const LayerSequence& seq = apx.layers();
    std::vector<double> b = random_proper_demands(g.n, seed + 100);
    std::vector<double> agg = apx.aggregate(b);
    for (NodeId v = 0; v < static_cast<NodeId>(seq.node_count()); ++v) {
      double expect = 0.0;
      for (VertexId u : seq.member_set(v)) expect += b[u];
      CHECK(agg[v] == doctest::Approx(expect).epsilon(1e-12));
    }
    // the root aggregates a proper vector to zero
    if (seq.node_set_size[seq.root_node] == g.n)
      CHECK(std::abs(agg[seq.root_node]) <= 1e-12);
  }
}

TEST_CASE("aggregation transpose sums over containing supervertices") {
  Instance g = make_random(20, 5);
  Approximator apx = Approximator::build(g);
  const LayerSequence& seq = apx.layers();

  // indicator of one leaf maps back to the indicator of its vertex
  std::vector<double> y(seq.node_count(), 0.0);
  NodeId leaf = seq.leaf_of_original[7];
  y[leaf] = 1.0;
  std::vector<double> back = apx.aggregate_transpose(y);
  for (VertexId u = 0; u < g.n; ++u) CHECK(back[u] == (u == 7 ? 1.0 : 0.0));

  // all-ones counts containment
  std::fill(y.begin(), y.end(), 1.0);
  back = apx.aggregate_transpose(y);
  for (VertexId u = 0; u < g.n; ++u) {
    double count = 0.0;
    for (NodeId v = 0; v < static_cast<NodeId>(seq.node_count()); ++v) {
      auto members = seq.member_set(v);
      if (std::binary_search(members.begin(), members.end(), u)) count += 1.0;
    }
    CHECK(back[u] == doctest::Approx(count).epsilon(1e-12));
  }
}

TEST_CASE("apply is linear with an exact adjoint") {
  Instance g = make_random(28, 6);
  Approximator apx = Approximator::build(g);

  std::vector<double> zero(g.n, 0.0);
  for (double v : apx.apply(zero)) CHECK(v == 0.0);

  std::vector<double> b = random_proper_demands(g.n, 41);
  std::vector<double> y(apx.row_count());
  for (std::size_t r = 0; r < y.size(); ++r)
    y[r] = std::sin(static_cast<double>(r) * 0.71);

  std::vector<double> pb = apx.apply(b);
  std::vector<double> pty = apx.apply_transpose(y);
  double lhs = 0.0, rhs = 0.0;
  for (std::size_t r = 0; r < y.size(); ++r) lhs += y[r] * pb[r];
  for (VertexId v = 0; v < g.n; ++v) rhs += pty[v] * b[v];
  CHECK(lhs == doctest::Approx(rhs).epsilon(1e-9));
}

TEST_CASE("per-edge columns agree with dense application") {
  Instance g = dumbbell();
  Approximator apx = Approximator::build(g);
  std::vector<std::pair<std::size_t, double>> col;
  for (const Edge& e : g.edges) {
    apx.edge_column(e.u, e.v, col);
    std::vector<double> unit(g.n, 0.0);
    unit[e.u] = 1.0;
    unit[e.v] = -1.0;
    std::vector<double> dense = apx.apply(unit);
    std::map<std::size_t, double> sparse(col.begin(), col.end());
    for (std::size_t r = 0; r < dense.size(); ++r) {
      double expect = dense[r];
      double got = sparse.count(r) ? sparse[r] : 0.0;
      CHECK(got == doctest::Approx(expect).epsilon(1e-12));
    }
  }
}

TEST_CASE("the path demand is sandwiched between opt and alpha opt") {
  Instance g = make_path(4);
  g.demands = {1.0, 0.0, 0.0, -1.0};
  Approximator apx = Approximator::build(g);
  double norm = apx.apply_norm1(g.demands);
  CHECK(norm >= 3.0 * (1.0 - 1e-12));
  CHECK(norm <= apx.alpha() * 3.0 * (1.0 + 1e-12));
}

TEST_CASE("flow realization routes the demand within the image norm") {
  Instance g = make_path(4);
  g.demands = {1.0, 0.0, 0.0, -1.0};
  Approximator apx = Approximator::build(g);

  Flow zero = apx.flow_from_p(std::vector<double>(4, 0.0));
  for (double x : zero.value) CHECK(x == 0.0);

  Flow f = apx.flow_from_p(g.demands);
  CHECK(is_routing(g, f, g.demands));
  CHECK(flow_cost(g, f) <= apx.apply_norm1(g.demands) * (1.0 + 1e-9));
}

TEST_CASE("flow realization property sweep") {
  for (std::uint64_t seed : {1, 2, 3, 4, 5}) {
    Instance g = make_random(20 + 6 * static_cast<std::size_t>(seed), seed);
    Approximator apx = Approximator::build(g);
    for (std::uint64_t ds = 0; ds < 4; ++ds) {
      std::vector<double> b = random_proper_demands(g.n, seed * 1000 + ds);
      Flow f = apx.flow_from_p(b);
      CHECK(is_routing(g, f, b));
      CHECK(flow_cost(g, f) <= apx.apply_norm1(b) * (1.0 + 1e-9));
    }
  }
}

TEST_CASE("distribution distortion is bounded by scaled layer distance") {
  for (std::uint64_t seed : {3, 7}) {
    Instance g = make_random(30, seed);
    Approximator apx = Approximator::build(g);
    const LayerSequence& seq = apx.layers();
    double hn = apx.harmonic();
    double lg = log2_real(g.n);

    for (std::size_t li = 0; li < seq.layers.size(); ++li) {
      const Layer& layer = seq.layers[li];
      if (layer.n() < 2) continue;
      auto dist = ref::apsp(layer.n(), layer.edges);
      for (std::uint32_t u = 0; u < layer.n(); ++u)
        for (std::uint32_t v = u + 1; v < layer.n(); ++v) {
          if (dist[u][v] == ref::kInf) continue;
          std::vector<double> du = dense_column(apx, li, u);
          std::vector<double> dv = dense_column(apx, li, v);
          double total = 0.0;
          for (std::size_t w = 0; w < layer.n(); ++w)
            total += std::abs(du[w] - dv[w]);
          double bound = 8.0 * dist[u][v] * hn * lg / layer.delta;
          CHECK(total < bound);
        }
    }
  }
}

TEST_CASE("identical layers reuse one routing pattern") {
  Approximator apx = Approximator::build(make_path(16));
  std::map<std::int32_t, int> uses;
  for (const RBlock& blk : apx.blocks()) ++uses[blk.pattern];
  int max_uses = 0;
  for (auto [pat, count] : uses) max_uses = std::max(max_uses, count);
  CHECK(max_uses > 1);
}
