#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "tship/approx.hpp"
#include "tship/graph.hpp"
#include "tship/types.hpp"

namespace tship {

struct OracleSolution {
  double opt_value = 0.0;
  Flow flow;
};

// Desk-scale ground truth. Solves transshipment exactly as a transportation
// problem between surplus and deficit vertices over the shortest path
// metric, then expands the metric legs back to graph edges.
class ExactOracle {
 public:
  explicit ExactOracle(const Instance& instance, std::size_t size_guard = 300);

  double opt(const std::vector<double>& b) const;
  OracleSolution solve(const std::vector<double>& b) const;
  const DistanceResult& tree(VertexId u) const;
  const Instance& instance() const { return instance_; }

 private:
  Instance instance_;
  Adjacency adj_;
  mutable std::vector<std::unique_ptr<DistanceResult>> trees_;
};

// Solves instance.demands directly. Throws TooLarge past the size guard.
OracleSolution exact_opt(const Instance& instance, std::size_t size_guard = 300);

struct SandwichReport {
  double min_ratio = 0.0;
  double max_ratio = 0.0;
  std::size_t cases = 0;
  std::size_t skipped = 0;
  bool pass = true;
};

// Ratio ||P b||_1 / OPT(b) over a batch of random proper demand vectors,
// checked against [1, alpha].
SandwichReport verify_sandwich(const Approximator& apx, std::size_t num_demands,
                               std::uint64_t seed);

}  // namespace tship
