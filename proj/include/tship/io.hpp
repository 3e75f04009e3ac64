#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "tship/types.hpp"

namespace tship {

// Instance text format: `c` comments, one `p tship <n> <m>` header, `e <u>
// <v> <cost>` per edge and optional `d <v> <value>` demand lines, all with
// 1-based vertex ids. Decimals render with 17 significant digits so parsing
// a rendered file reproduces the doubles exactly.
Instance parse_instance(std::istream& in);
Instance parse_instance_file(const std::string& path);
void render_instance(const Instance& instance, std::ostream& out);

// Flow file: `f <u> <v> <value>` lines on instance edges plus a trailing
// `s cost <value>` checked against the recomputed cost.
Flow parse_flow(std::istream& in, const Instance& instance);
Flow parse_flow_file(const std::string& path, const Instance& instance);
void render_flow(const Instance& instance, const Flow& flow,
                 std::ostream& out);

std::string format_double(double x);

// Deterministic instance generators.
Instance make_path(std::size_t n);
Instance make_cycle(std::size_t n);
Instance make_grid(std::size_t rows, std::size_t cols);
// Sparse random graph conditioned on connectivity, edge probability 3/n,
// costs log-uniform in [1, 1e6].
Instance make_random(std::size_t n, std::uint64_t seed);

std::vector<double> random_proper_demands(std::size_t n, std::uint64_t seed);

std::uint64_t splitmix64(std::uint64_t x);

}  // namespace tship
