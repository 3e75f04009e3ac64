#include "tship/oracle.hpp"

#include <algorithm>
#include <bit>
#include <cassert>
#include <cmath>
#include <map>
#include <queue>

#include "tship/graph.hpp"

namespace tship {

int oracle_level_count(std::size_t original_n) {
  if (original_n <= 2) return 1;
  return static_cast<int>(std::bit_width(original_n - 1));
}

namespace {

struct SourceHit {
  double dist;
  std::uint32_t src;  // local supervertex id
};

// Multi-source Dijkstra that settles each vertex for up to `cap` distinct
// sources, in increasing (distance, source representative) order.
void k_nearest(const Adjacency& adj, const std::vector<VertexId>& rep,
               const std::vector<std::uint32_t>& sources, std::size_t cap,
               std::vector<std::vector<SourceHit>>& out) {
  struct Item {
    double dist;
    VertexId srep;
    std::uint32_t src;
    std::uint32_t v;
    bool operator>(const Item& o) const {
      if (dist != o.dist) return dist > o.dist;
      if (srep != o.srep) return srep > o.srep;
      return v > o.v;
    }
  };
  std::priority_queue<Item, std::vector<Item>, std::greater<Item>> heap;
  out.assign(adj.n(), {});
  for (std::uint32_t s : sources) heap.push({0.0, rep[s], s, s});
  while (!heap.empty()) {
    Item it = heap.top();
    heap.pop();
    auto& lst = out[it.v];
    if (lst.size() >= cap) continue;
    bool dup = false;
    for (const SourceHit& h : lst)
      if (h.src == it.src) {
        dup = true;
        break;
      }
    if (dup) continue;
    lst.push_back({it.dist, it.src});
    for (const auto& arc : adj[it.v])
      if (out[arc.to].size() < cap)
        heap.push({it.dist + arc.cost, it.srep, it.src, arc.to});
  }
}

// Ranked distance from every vertex to the nearest member of `sources`.
std::vector<RankedDist> set_distance(const Adjacency& adj,
                                     const std::vector<VertexId>& rep,
                                     const std::vector<std::uint32_t>& sources) {
  std::vector<RankedDist> best(adj.n(), RankedDist{kInf, 0});
  struct Item {
    double dist;
    VertexId srep;
    std::uint32_t v;
    bool operator>(const Item& o) const {
      if (dist != o.dist) return dist > o.dist;
      if (srep != o.srep) return srep > o.srep;
      return v > o.v;
    }
  };
  std::priority_queue<Item, std::vector<Item>, std::greater<Item>> heap;
  std::vector<char> done(adj.n(), 0);
  for (std::uint32_t s : sources) heap.push({0.0, rep[s], s});
  while (!heap.empty()) {
    Item it = heap.top();
    heap.pop();
    if (done[it.v]) continue;
    done[it.v] = 1;
    best[it.v] = {it.dist, it.srep};
    for (const auto& arc : adj[it.v])
      if (!done[arc.to]) heap.push({it.dist + arc.cost, it.srep, arc.to});
  }
  return best;
}

// Greedy hitting set over the balls that reached the cap. Picks the source
// covering the most uncovered balls, ties to the smaller id.
std::vector<std::uint32_t> greedy_hitting(
    const std::vector<std::vector<SourceHit>>& balls,
    const std::vector<char>& needs_hit, std::size_t n_vertices) {
  std::vector<std::vector<std::uint32_t>> balls_of_src(n_vertices);
  std::vector<std::uint32_t> pending;
  for (std::uint32_t v = 0; v < balls.size(); ++v) {
    if (!needs_hit[v]) continue;
    pending.push_back(v);
    for (const SourceHit& h : balls[v]) balls_of_src[h.src].push_back(v);
  }
  if (pending.empty()) return {};

  std::vector<std::uint32_t> count(n_vertices, 0);
  for (std::uint32_t v : pending)
    for (const SourceHit& h : balls[v]) ++count[h.src];

  struct Item {
    std::uint32_t count;
    std::uint32_t src;
    bool operator<(const Item& o) const {
      if (count != o.count) return count < o.count;
      return src > o.src;
    }
  };
  std::priority_queue<Item> heap;
  for (std::uint32_t s = 0; s < n_vertices; ++s)
    if (count[s] > 0) heap.push({count[s], s});

  std::vector<char> covered(balls.size(), 0);
  std::vector<std::uint32_t> picked;
  std::size_t remaining = pending.size();
  while (remaining > 0) {
    assert(!heap.empty());
    Item it = heap.top();
    heap.pop();
    if (it.count != count[it.src]) continue;  // stale entry
    picked.push_back(it.src);
    for (std::uint32_t v : balls_of_src[it.src]) {
      if (covered[v]) continue;
      covered[v] = 1;
      --remaining;
      for (const SourceHit& h : balls[v]) {
        if (--count[h.src] > 0 && h.src != it.src)
          heap.push({count[h.src], h.src});
      }
    }
    count[it.src] = 0;
  }
  std::sort(picked.begin(), picked.end());
  return picked;
}

std::size_t ball_cap(std::size_t n_layer) {
  double c = std::ceil(4.0 * std::log(static_cast<double>(n_layer) + 2.0));
  return std::clamp<std::size_t>(static_cast<std::size_t>(c), 4, 64);
}

OracleData assemble_pieces(const Layer& layer, const Adjacency& adj,
                           std::vector<std::vector<std::uint32_t>> samples,
                           int k, std::size_t initial_cap) {
  const std::size_t n = layer.n();
  OracleData data;
  data.k = k;
  data.n = n;

  std::vector<std::vector<std::vector<SourceHit>>> pieces(k);
  std::vector<std::vector<SourceHit>> hits;
  for (int j = 0; j < k; ++j) {
    std::vector<RankedDist> next_dist(n, RankedDist{kInf, 0});
    if (j + 1 < k)
      next_dist = set_distance(adj, layer.rep, samples[j + 1]);

    std::size_t cap = std::min(initial_cap, samples[j].size());
    while (true) {
      k_nearest(adj, layer.rep, samples[j], cap, hits);
      bool resolved = true;
      for (std::size_t v = 0; v < n && resolved; ++v) {
        if (hits[v].size() < cap) continue;
        RankedDist last{hits[v].back().dist, layer.rep[hits[v].back().src]};
        if (next_dist[v] < last || next_dist[v] == last) continue;
        resolved = false;
      }
      if (resolved || cap >= samples[j].size()) break;
      cap = std::min(cap * 2, samples[j].size());
    }

    auto& level = pieces[j];
    level.assign(n, {});
    for (std::size_t v = 0; v < n; ++v) {
      for (const SourceHit& h : hits[v]) {
        RankedDist r{h.dist, layer.rep[h.src]};
        if (r < next_dist[v])
          level[v].push_back(h);
        else
          break;  // hits are sorted by ranked distance
      }
    }
  }

  data.samples = std::move(samples);
  data.piece_offset.assign(n * k + 1, 0);
  std::size_t total = 0;
  for (std::size_t v = 0; v < n; ++v)
    for (int j = 0; j < k; ++j) {
      total += pieces[j][v].size();
      data.piece_offset[v * static_cast<std::size_t>(k) + j + 1] = total;
    }
  data.members.reserve(total);
  for (std::size_t v = 0; v < n; ++v)
    for (int j = 0; j < k; ++j)
      for (const SourceHit& h : pieces[j][v])
        data.members.push_back({h.src, h.dist});
  return data;
}

}  // namespace

OracleData bundles_from_samples(const Layer& layer,
                                std::vector<std::vector<std::uint32_t>> samples,
                                int k) {
  if (layer.n() == 0)
    throw Error(ErrorCode::DegenerateLayer, "empty layer has no oracle");
  assert(static_cast<int>(samples.size()) == k);
  Adjacency adj(layer.n(), layer.edges);
  return assemble_pieces(layer, adj, std::move(samples), k,
                         ball_cap(layer.n()));
}

OracleData build_oracle(const Layer& layer, int k) {
  const std::size_t n = layer.n();
  if (n == 0)
    throw Error(ErrorCode::DegenerateLayer, "empty layer has no oracle");
  Adjacency adj(n, layer.edges);

  std::vector<std::vector<std::uint32_t>> samples(k);
  samples[0].resize(n);
  for (std::uint32_t v = 0; v < n; ++v) samples[0][v] = v;

  const std::size_t cap = ball_cap(n);
  std::vector<std::vector<SourceHit>> hits;
  for (int j = 0; j + 1 < k; ++j) {
    std::size_t level_cap = std::min(cap, samples[j].size());
    k_nearest(adj, layer.rep, samples[j], level_cap, hits);
    std::vector<char> full(n, 0);
    for (std::size_t v = 0; v < n; ++v)
      full[v] = hits[v].size() >= level_cap && level_cap == cap;
    samples[j + 1] = greedy_hitting(hits, full, n);
    if (samples[j + 1].empty()) samples[j + 1].push_back(samples[j].front());
  }

  return assemble_pieces(layer, adj, std::move(samples), k, cap);
}

OraclePool build_oracles(const LayerSequence& seq, int k) {
  OraclePool pool;
  pool.index_of_layer.assign(seq.layers.size(), -1);
  std::map<std::pair<std::size_t, std::size_t>, std::int32_t> by_signature;
  for (std::size_t i = 0; i < seq.layers.size(); ++i) {
    const Layer& layer = seq.layers[i];
    if (layer.n() == 0) continue;
    auto key = std::make_pair(layer.sig_lo, layer.sig_hi);
    auto it = by_signature.find(key);
    if (it != by_signature.end()) {
      pool.index_of_layer[i] = it->second;
      continue;
    }
    std::int32_t idx = static_cast<std::int32_t>(pool.storage.size());
    pool.storage.push_back(build_oracle(layer, k));
    by_signature.emplace(key, idx);
    pool.index_of_layer[i] = idx;
  }
  return pool;
}

}  // namespace tship
