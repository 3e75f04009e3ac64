#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace tship {

using VertexId = std::uint32_t;
using EdgeId = std::uint32_t;

struct Edge {
  VertexId u = 0;  // tail of the fixed orientation
  VertexId v = 0;  // head
  double cost = 0.0;

  bool operator==(const Edge& o) const = default;
};

// Undirected transshipment instance. Demands are indexed by vertex; a
// positive demand pushes flow into the graph, a negative one absorbs it.
struct Instance {
  std::size_t n = 0;
  std::vector<Edge> edges;
  std::vector<double> demands;

  std::size_t m() const { return edges.size(); }

  bool operator==(const Instance& o) const = default;
};

// Signed per-edge flow values with respect to the instance's stored edge
// orientation (positive = tail to head).
struct Flow {
  std::vector<double> value;

  Flow() = default;
  explicit Flow(std::size_t m) : value(m, 0.0) {}

  double& operator[](std::size_t e) { return value[e]; }
  double operator[](std::size_t e) const { return value[e]; }
  std::size_t size() const { return value.size(); }
};

struct DistanceResult {
  VertexId source = 0;
  std::vector<double> dist;
  // Predecessor vertex on the shortest path tree; `no_parent` for the
  // source and for unreachable vertices.
  std::vector<VertexId> parent;
  // Edge index used to reach each vertex from its parent.
  std::vector<EdgeId> parent_edge;

  static constexpr VertexId no_parent = static_cast<VertexId>(-1);
};

enum class ErrorCode {
  Disconnected,
  ImproperDemands,
  NonpositiveCost,
  ParallelEdgeOrLoop,
  TooSmall,
  TooLarge,
  DegenerateLayer,
  NotConverged,
  ParseError,
};

const char* error_token(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& detail)
      : std::runtime_error(std::string(error_token(code)) +
                           (detail.empty() ? "" : ": " + detail)),
        code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

// Strict total order on (distance, vertex id) pairs. Every place the
// algorithms compare distances uses this order, which makes all distances
// over a fixed source pairwise distinct.
struct RankedDist {
  double dist = 0.0;
  VertexId id = 0;

  friend bool operator<(const RankedDist& a, const RankedDist& b) {
    if (a.dist != b.dist) return a.dist < b.dist;
    return a.id < b.id;
  }
  friend bool operator==(const RankedDist& a, const RankedDist& b) = default;
  friend bool operator<=(const RankedDist& a, const RankedDist& b) {
    return a < b || a == b;
  }
};

}  // namespace tship
