#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "tship/exact.hpp"
#include "tship/graph.hpp"
#include "tship/io.hpp"
#include "tship/log.hpp"
#include "tship/solver.hpp"

namespace {

using namespace tship;

int cmd_solve(const std::string& input, double eps, const std::string& out_path,
              const std::string& router, const std::string& report_format) {
  Instance instance = parse_instance_file(input);
  validate(instance);

  SolveConfig config;
  config.eps = eps;
  config.residual_router = router == "approximator"
                               ? ResidualRouter::approximator
                               : ResidualRouter::mst;
  SolveReport report = solve(instance, config);

  if (!out_path.empty()) {
    std::ofstream out(out_path);
    if (!out) throw Error(ErrorCode::ParseError, "cannot write " + out_path);
    render_flow(instance, report.flow, out);
  }

  if (report_format == "json") {
    nlohmann::json j;
    j["cost"] = report.cost;
    j["approx_cost_bound"] = report.approx_cost_bound;
    j["certified_ratio"] = report.certified_ratio;
    j["lower_bound"] = report.lower_bound;
    j["iterations"] = report.iterations;
    j["rounds"] = report.rounds;
    j["residual_norm"] = report.residual_norm;
    j["converged"] = report.converged;
    j["wall_time_s"] = report.wall_time_s;
    std::cout << j.dump(2) << '\n';
  } else {
    std::cout << render_report(report);
  }

  if (!report.converged) {
    std::cerr << "error: " << error_token(ErrorCode::NotConverged)
              << ": residual norm " << format_double(report.residual_norm)
              << " after " << report.iterations << " iterations\n";
    return 2;
  }
  return 0;
}

int cmd_verify(const std::string& instance_path, const std::string& flow_path,
               double eps) {
  Instance instance = parse_instance_file(instance_path);
  validate(instance);
  Flow flow = parse_flow_file(flow_path, instance);

  std::vector<double> r = residual(instance, instance.demands, flow);
  double scale = sum_abs(instance.demands);
  double bound = scale > 0.0 ? 1e-9 * scale : 1e-12;
  double worst = 0.0;
  VertexId worst_vertex = 0;
  for (VertexId v = 0; v < instance.n; ++v)
    if (std::abs(r[v]) > worst) {
      worst = std::abs(r[v]);
      worst_vertex = v;
    }
  double cost = flow_cost(instance, flow);
  std::cout << "cost " << format_double(cost) << '\n';
  if (worst > bound) {
    std::cout << "routing fail: max violation " << format_double(worst)
              << " at vertex " << worst_vertex + 1 << '\n';
    return 1;
  }
  std::cout << "routing ok: max violation " << format_double(worst) << '\n';

  if (eps > 0.0) {
    if (instance.n > 300) {
      std::cout << "ratio skipped: instance too large for the exact oracle\n";
    } else {
      OracleSolution exact = exact_opt(instance);
      std::cout << "opt " << format_double(exact.opt_value) << '\n';
      double limit = (1.0 + eps) * exact.opt_value + 1e-9 * scale;
      if (cost > limit) {
        std::cout << "ratio fail: cost exceeds (1+eps) opt\n";
        return 1;
      }
      std::cout << "ratio ok\n";
    }
  }
  return 0;
}

int cmd_diag(const std::string& instance_path, const std::string& what) {
  Instance instance = parse_instance_file(instance_path);
  validate(instance);

  if (what == "layers") {
    LayerSequence seq = build_layers(instance);
    for (const Layer& layer : seq.layers)
      std::cout << "layer " << layer.index << ' ' << format_double(layer.delta)
                << ' ' << layer.n() << ' ' << layer.m() << '\n';
    return 0;
  }

  Approximator apx = Approximator::build(instance);
  if (what == "oracle") {
    std::size_t max_bundle = 0;
    double total = 0.0;
    std::size_t nodes = 0;
    for (std::size_t i = 0; i < apx.layers().layers.size(); ++i) {
      const Layer& layer = apx.layers().layers[i];
      const OracleData* oracle = apx.oracles().for_layer(i);
      if (!oracle) continue;
      std::size_t layer_max = 0;
      for (std::size_t v = 0; v < layer.n(); ++v)
        layer_max = std::max(layer_max, oracle->bundle_size(v));
      std::cout << "layer " << layer.index << " max_bundle " << layer_max
                << '\n';
      max_bundle = std::max(max_bundle, layer_max);
      for (std::size_t v = 0; v < layer.n(); ++v) total += oracle->bundle_size(v);
      nodes += layer.n();
    }
    std::cout << "max_bundle " << max_bundle << '\n';
    std::cout << "avg_bundle "
              << format_double(nodes ? total / static_cast<double>(nodes) : 0.0)
              << '\n';
    return 0;
  }
  if (what == "approx") {
    // column sum deviations of the distribution and routing entries
    double dev_d = 0.0;
    const LayerSequence& seq = apx.layers();
    for (NodeId v = 0; v < static_cast<NodeId>(seq.node_count()); ++v) {
      double s = 0.0;
      for (double x : apx.distribution().column(v)) s += x;
      dev_d = std::max(dev_d, std::abs(s - 1.0));
    }
    double dev_r = 0.0;
    for (const RBlock& blk : apx.blocks()) {
      const Layer& layer = seq.layers[blk.child_layer];
      for (std::size_t pos = 0; pos < blk.cols.size(); ++pos) {
        double cs = 0.0;
        for (double x : apx.distribution().column(layer.node_of(blk.cols[pos])))
          cs += x;
        double ps = 1.0;
        if (!blk.root) {
          ps = 0.0;
          const Layer& player = seq.layers[blk.parent_layer];
          for (double x :
               apx.distribution().column(player.node_of(blk.parent_local[pos])))
            ps += x;
        }
        dev_r = std::max(dev_r, std::abs(cs * ps - 1.0));
      }
    }
    std::cout << "d_nnz " << apx.distribution().nnz() << '\n'
              << "r_nnz " << apx.routing_nnz() << '\n'
              << "rows " << apx.row_count() << '\n'
              << "alpha " << format_double(apx.alpha()) << '\n'
              << "max_colsum_dev_d " << format_double(dev_d) << '\n'
              << "max_colsum_dev_r " << format_double(dev_r) << '\n';
    return 0;
  }
  std::cerr << "error: unknown diag kind '" << what << "'\n";
  return 1;
}

Instance family_instance(const std::string& family, std::size_t n,
                         std::uint64_t seed) {
  if (family == "path") return make_path(n);
  if (family == "grid") {
    std::size_t side = static_cast<std::size_t>(std::lround(std::sqrt(n)));
    side = std::max<std::size_t>(side, 2);
    return make_grid(side, side);
  }
  return make_random(n, seed);
}

int cmd_bench(const std::string& family, const std::string& sizes_arg,
              double eps, std::uint64_t seed, const std::string& csv_path) {
  std::vector<std::size_t> sizes;
  std::stringstream ss(sizes_arg);
  for (std::string tok; std::getline(ss, tok, ',');)
    sizes.push_back(static_cast<std::size_t>(std::stoul(tok)));

  std::ostringstream csv;
  csv << "n,m,build_time,apply_P_time,solve_time,iterations,cost,opt,ratio\n";
  for (std::size_t n : sizes) {
    std::uint64_t child_seed =
        splitmix64(seed ^ splitmix64(n) ^
                   std::hash<std::string>{}(family));
    Instance instance = family_instance(family, n, child_seed);
    instance.demands = random_proper_demands(instance.n, child_seed + 1);
    validate(instance);

    auto t0 = std::chrono::steady_clock::now();
    Solver solver = Solver::from_instance(instance);
    double build_time =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();

    double apply_time = 0.0;
    {
      std::vector<double> y;
      constexpr int reps = 5;
      std::vector<double> times(reps);
      for (int rep = 0; rep < reps; ++rep) {
        auto ta = std::chrono::steady_clock::now();
        solver.approximator().apply(instance.demands, y);
        times[rep] =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - ta)
                .count();
      }
      std::sort(times.begin(), times.end());
      apply_time = times[reps / 2];
    }

    SolveConfig config;
    config.eps = eps;
    SolveReport report = solver.solve(instance.demands, config);

    csv << instance.n << ',' << instance.m() << ','
        << format_double(build_time) << ',' << format_double(apply_time) << ','
        << format_double(report.wall_time_s) << ',' << report.iterations << ','
        << format_double(report.cost) << ',';
    if (instance.n <= 300) {
      OracleSolution exact = exact_opt(instance);
      csv << format_double(exact.opt_value) << ','
          << format_double(exact.opt_value > 0.0
                               ? report.cost / exact.opt_value
                               : 1.0);
    } else {
      csv << ',';
    }
    csv << '\n';
    log_info("bench: n=" + std::to_string(instance.n) + " done");
  }

  if (csv_path.empty()) {
    std::cout << csv.str();
  } else {
    std::ofstream out(csv_path);
    if (!out) throw Error(ErrorCode::ParseError, "cannot write " + csv_path);
    out << csv.str();
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"deterministic (1+eps) transshipment solver"};
  app.require_subcommand(1);

  std::string input, out_path, router = "mst", report_format = "text";
  double eps = 0.1;
  auto* solve_cmd = app.add_subcommand("solve", "solve an instance file");
  solve_cmd->add_option("input", input)->required();
  solve_cmd->add_option("--eps", eps)->required();
  solve_cmd->add_option("--out", out_path);
  solve_cmd->add_option("--residual-router", router)
      ->check(CLI::IsMember({"mst", "approximator"}));
  solve_cmd->add_option("--report", report_format)
      ->check(CLI::IsMember({"text", "json"}));

  std::string flow_path;
  double verify_eps = 0.0;
  auto* verify_cmd = app.add_subcommand("verify", "check a flow file");
  verify_cmd->add_option("instance", input)->required();
  verify_cmd->add_option("flow", flow_path)->required();
  verify_cmd->add_option("--eps", verify_eps);

  std::string diag_kind;
  auto* diag_cmd = app.add_subcommand("diag", "dump internals");
  diag_cmd->add_option("instance", input)->required();
  diag_cmd->add_option("kind", diag_kind)
      ->required()
      ->check(CLI::IsMember({"layers", "oracle", "approx"}));

  std::string family = "path", sizes = "100,200,400", csv_path;
  std::uint64_t seed = 1;
  auto* bench_cmd = app.add_subcommand("bench", "timing harness");
  bench_cmd->add_option("--family", family)
      ->check(CLI::IsMember({"path", "grid", "random"}));
  bench_cmd->add_option("--sizes", sizes);
  bench_cmd->add_option("--eps", eps);
  bench_cmd->add_option("--seed", seed);
  bench_cmd->add_option("--csv", csv_path);

  CLI11_PARSE(app, argc, argv);

  try {
    if (solve_cmd->parsed())
      return cmd_solve(input, eps, out_path, router, report_format);
    if (verify_cmd->parsed()) return cmd_verify(input, flow_path, verify_eps);
    if (diag_cmd->parsed()) return cmd_diag(input, diag_kind);
    if (bench_cmd->parsed())
      return cmd_bench(family, sizes, eps, seed, csv_path);
  } catch (const tship::Error& err) {
    std::cerr << "error: " << err.what() << '\n';
    return 1;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << '\n';
    return 1;
  }
  return 0;
}
