#include "tship/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>
#include <unordered_map>

#include "tship/graph.hpp"

namespace tship {

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

namespace {

[[noreturn]] void parse_fail(std::size_t line, const std::string& what) {
  throw Error(ErrorCode::ParseError, "line " + std::to_string(line) + ": " + what);
}

double parse_number(const std::string& tok, std::size_t line) {
  char* end = nullptr;
  double v = std::strtod(tok.c_str(), &end);
  if (end == tok.c_str() || *end != '\0') parse_fail(line, "bad number '" + tok + "'");
  return v;
}

long parse_int(const std::string& tok, std::size_t line) {
  char* end = nullptr;
  long v = std::strtol(tok.c_str(), &end, 10);
  if (end == tok.c_str() || *end != '\0') parse_fail(line, "bad integer '" + tok + "'");
  return v;
}

// Simple deterministic uniform in [0, 1) from a 64-bit generator state.
struct Rng {
  std::uint64_t state;
  std::uint64_t next() {
    state = splitmix64(state);
    return state;
  }
  double uniform01() { return (next() >> 11) * 0x1.0p-53; }
};

}  // namespace

Instance parse_instance(std::istream& in) {
  Instance instance;
  bool have_header = false;
  std::size_t expected_m = 0;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream ls(line);
    std::string tag;
    if (!(ls >> tag) || tag == "c") continue;
    if (tag == "p") {
      if (have_header) parse_fail(lineno, "duplicate header");
      std::string kind, ntok, mtok;
      if (!(ls >> kind >> ntok >> mtok) || kind != "tship")
        parse_fail(lineno, "expected 'p tship <n> <m>'");
      long n = parse_int(ntok, lineno), m = parse_int(mtok, lineno);
      if (n <= 0 || m < 0) parse_fail(lineno, "bad sizes");
      instance.n = static_cast<std::size_t>(n);
      instance.demands.assign(instance.n, 0.0);
      expected_m = static_cast<std::size_t>(m);
      have_header = true;
      continue;
    }
    if (!have_header) parse_fail(lineno, "content before header");
    if (tag == "e") {
      std::string ut, vt, ct;
      if (!(ls >> ut >> vt >> ct)) parse_fail(lineno, "expected 'e <u> <v> <cost>'");
      long u = parse_int(ut, lineno), v = parse_int(vt, lineno);
      if (u < 1 || v < 1 || u > static_cast<long>(instance.n) ||
          v > static_cast<long>(instance.n))
        parse_fail(lineno, "vertex id out of range");
      instance.edges.push_back({static_cast<VertexId>(u - 1),
                                static_cast<VertexId>(v - 1),
                                parse_number(ct, lineno)});
      continue;
    }
    if (tag == "d") {
      std::string vt, bt;
      if (!(ls >> vt >> bt)) parse_fail(lineno, "expected 'd <v> <value>'");
      long v = parse_int(vt, lineno);
      if (v < 1 || v > static_cast<long>(instance.n))
        parse_fail(lineno, "vertex id out of range");
      instance.demands[static_cast<std::size_t>(v - 1)] = parse_number(bt, lineno);
      continue;
    }
    parse_fail(lineno, "unknown line tag '" + tag + "'");
  }
  if (!have_header) parse_fail(lineno, "missing header");
  if (instance.edges.size() != expected_m)
    parse_fail(lineno, "header announced " + std::to_string(expected_m) +
                           " edges, found " + std::to_string(instance.edges.size()));
  return instance;
}

Instance parse_instance_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ParseError, "cannot open " + path);
  return parse_instance(in);
}

void render_instance(const Instance& instance, std::ostream& out) {
  out << "p tship " << instance.n << ' ' << instance.edges.size() << '\n';
  for (const Edge& e : instance.edges)
    out << "e " << e.u + 1 << ' ' << e.v + 1 << ' ' << format_double(e.cost)
        << '\n';
  for (std::size_t v = 0; v < instance.n; ++v)
    if (instance.demands[v] != 0.0)
      out << "d " << v + 1 << ' ' << format_double(instance.demands[v]) << '\n';
}

Flow parse_flow(std::istream& in, const Instance& instance) {
  std::unordered_map<std::uint64_t, EdgeId> edge_index;
  edge_index.reserve(instance.edges.size() * 2);
  for (EdgeId e = 0; e < instance.edges.size(); ++e) {
    VertexId a = std::min(instance.edges[e].u, instance.edges[e].v);
    VertexId b = std::max(instance.edges[e].u, instance.edges[e].v);
    edge_index[(static_cast<std::uint64_t>(a) << 32) | b] = e;
  }

  Flow f(instance.m());
  bool have_cost = false;
  double declared_cost = 0.0;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream ls(line);
    std::string tag;
    if (!(ls >> tag) || tag == "c") continue;
    if (tag == "f") {
      std::string ut, vt, xt;
      if (!(ls >> ut >> vt >> xt)) parse_fail(lineno, "expected 'f <u> <v> <value>'");
      long u = parse_int(ut, lineno), v = parse_int(vt, lineno);
      if (u < 1 || v < 1 || u > static_cast<long>(instance.n) ||
          v > static_cast<long>(instance.n))
        parse_fail(lineno, "vertex id out of range");
      VertexId uu = static_cast<VertexId>(u - 1), vv = static_cast<VertexId>(v - 1);
      VertexId a = std::min(uu, vv), b = std::max(uu, vv);
      auto it = edge_index.find((static_cast<std::uint64_t>(a) << 32) | b);
      if (it == edge_index.end()) parse_fail(lineno, "not an instance edge");
      double value = parse_number(xt, lineno);
      f[it->second] += instance.edges[it->second].u == uu ? value : -value;
      continue;
    }
    if (tag == "s") {
      std::string kind, xt;
      if (!(ls >> kind >> xt) || kind != "cost")
        parse_fail(lineno, "expected 's cost <value>'");
      declared_cost = parse_number(xt, lineno);
      have_cost = true;
      continue;
    }
    parse_fail(lineno, "unknown line tag '" + tag + "'");
  }
  if (have_cost) {
    double actual = flow_cost(instance, f);
    double tol = 1e-6 * std::max(1.0, std::abs(actual));
    if (std::abs(actual - declared_cost) > tol)
      throw Error(ErrorCode::ParseError,
                  "trailer cost " + format_double(declared_cost) +
                      " does not match recomputed " + format_double(actual));
  }
  return f;
}

Flow parse_flow_file(const std::string& path, const Instance& instance) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ParseError, "cannot open " + path);
  return parse_flow(in, instance);
}

void render_flow(const Instance& instance, const Flow& flow,
                 std::ostream& out) {
  for (EdgeId e = 0; e < instance.edges.size(); ++e)
    if (flow[e] != 0.0)
      out << "f " << instance.edges[e].u + 1 << ' ' << instance.edges[e].v + 1
          << ' ' << format_double(flow[e]) << '\n';
  out << "s cost " << format_double(flow_cost(instance, flow)) << '\n';
}

Instance make_path(std::size_t n) {
  Instance instance;
  instance.n = n;
  instance.demands.assign(n, 0.0);
  for (std::size_t i = 0; i + 1 < n; ++i)
    instance.edges.push_back({static_cast<VertexId>(i),
                              static_cast<VertexId>(i + 1), 1.0});
  return instance;
}

Instance make_cycle(std::size_t n) {
  Instance instance = make_path(n);
  instance.edges.push_back({static_cast<VertexId>(n - 1), 0, 1.0});
  return instance;
}

Instance make_grid(std::size_t rows, std::size_t cols) {
  Instance instance;
  instance.n = rows * cols;
  instance.demands.assign(instance.n, 0.0);
  auto id = [cols](std::size_t r, std::size_t c) {
    return static_cast<VertexId>(r * cols + c);
  };
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < cols; ++c) {
      if (c + 1 < cols) instance.edges.push_back({id(r, c), id(r, c + 1), 1.0});
      if (r + 1 < rows) instance.edges.push_back({id(r, c), id(r + 1, c), 1.0});
    }
  return instance;
}

Instance make_random(std::size_t n, std::uint64_t seed) {
  const double p = 3.0 / static_cast<double>(n);
  for (std::uint64_t attempt = 0;; ++attempt) {
    Rng rng{splitmix64(seed ^ splitmix64(attempt))};
    Instance instance;
    instance.n = n;
    instance.demands.assign(n, 0.0);
    for (std::size_t u = 0; u < n; ++u)
      for (std::size_t v = u + 1; v < n; ++v) {
        if (rng.uniform01() >= p) continue;
        double cost = std::pow(10.0, 6.0 * rng.uniform01());
        instance.edges.push_back({static_cast<VertexId>(u),
                                  static_cast<VertexId>(v), cost});
      }
    try {
      validate(instance);
    } catch (const Error&) {
      continue;  // almost always a connectivity miss; redraw
    }
    return instance;
  }
}

std::vector<double> random_proper_demands(std::size_t n, std::uint64_t seed) {
  Rng rng{splitmix64(seed)};
  std::vector<double> b(n);
  double total = 0.0;
  for (std::size_t v = 0; v < n; ++v) {
    b[v] = 2.0 * rng.uniform01() - 1.0;
    total += b[v];
  }
  double mean = total / static_cast<double>(n);
  for (double& x : b) x -= mean;
  double rest = std::accumulate(b.begin(), b.end() - 1, 0.0);
  b[n - 1] = -rest;
  return b;
}

}  // namespace tship
