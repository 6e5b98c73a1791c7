#include "lbpcert/cli.hpp"

#include <fstream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "lbpcert/certificates.hpp"
#include "lbpcert/experiments.hpp"
#include "lbpcert/factor_graph.hpp"
#include "lbpcert/lbp.hpp"
#include "lbpcert/spectral.hpp"
#include "lbpcert/text_format.hpp"

namespace lbpcert {

namespace {

FactorGraph load_graph(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open file '" + path + "'");
  return parse_factor_graph(in);
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write file '" + path + "'");
  out << content;
  if (!out) throw std::runtime_error("write to '" + path + "' failed");
}

int cmd_check(const std::string& file, const std::string& condition,
              double tol, bool json, std::ostream& out, std::ostream& err) {
  const FactorGraph g = load_graph(file);

  std::vector<CertificateReport> reports;
  const bool want_all = condition == "all";
  if (want_all || condition == "l1") {
    if (is_simple_binary_pairwise(g))
      reports.push_back(l1_condition_binary(to_ising(g)));
    else
      reports.push_back(l1_condition_general(g));
  }
  if (want_all || condition == "spectral")
    reports.push_back(spectral_condition(g, tol));
  if (want_all || condition == "ihler") {
    bool pairwise = true;
    for (const Factor& f : g.factors) pairwise &= f.vars.size() <= 2;
    if (pairwise) {
      reports.push_back(ihler_condition_pairwise(g));
    } else if (want_all) {
      err << "note: skipping ihler-pairwise, the graph has factors of arity"
             " > 2\n";
    } else {
      throw std::runtime_error(
          "the ihler condition requires factor arities <= 2");
    }
  }

  if (json) {
    auto to_json = [](const CertificateReport& r) {
      return nlohmann::json{
          {"condition", r.condition}, {"value", r.value}, {"pass", r.pass}};
    };
    if (want_all) {
      nlohmann::json arr = nlohmann::json::array();
      for (const auto& r : reports) arr.push_back(to_json(r));
      out << arr.dump(2) << "\n";
    } else {
      out << to_json(reports.front()).dump(2) << "\n";
    }
  } else {
    for (const auto& r : reports)
      out << r.condition << " value=" << format_double(r.value)
          << " verdict=" << (r.pass ? "GUARANTEED" : "INCONCLUSIVE") << "\n";
  }

  for (const auto& r : reports)
    if (r.pass) return 0;
  return 3;
}

int cmd_run(const std::string& file, const LbpOptions& opts,
            const std::string& beliefs_path, std::ostream& out) {
  const FactorGraph g = load_graph(file);
  const LbpResult r = run_lbp(g, opts);

  out << "converged=" << (r.converged ? "true" : "false")
      << " iterations=" << r.iterations
      << " final_residual=" << format_double(r.final_residual)
      << " damping=" << format_double(opts.damping) << " seed=" << opts.seed
      << " init=" << (opts.init == MessageInit::kUniform ? "uniform" : "random")
      << " tol=" << format_double(opts.tol) << "\n";

  if (!beliefs_path.empty()) {
    // beliefs as a factor-graph-style file: one single-variable block per
    // variable belief, then one block per factor belief
    std::vector<Factor> blocks;
    for (int v = 0; v < g.num_vars; ++v)
      blocks.push_back({{v}, r.var_beliefs[static_cast<std::size_t>(v)]});
    for (std::size_t fi = 0; fi < g.factors.size(); ++fi)
      blocks.push_back({g.factors[fi].vars, r.factor_beliefs[fi]});
    const FactorGraph beliefs =
        make_graph(g.num_vars, g.cardinalities, std::move(blocks));
    write_file(beliefs_path, serialize_factor_graph(beliefs));
  }
  return 0;
}

int cmd_oracle(const std::string& file, std::ostream& out) {
  const FactorGraph g = load_graph(file);
  const Marginals m = brute_force_marginals(g);
  for (int v = 0; v < g.num_vars; ++v) {
    out << "var " << v << ":";
    for (double p : m.var[static_cast<std::size_t>(v)])
      out << " " << format_double(p);
    out << "\n";
  }
  for (std::size_t fi = 0; fi < g.factors.size(); ++fi) {
    out << "factor " << fi << " (vars";
    for (int v : g.factors[fi].vars) out << " " << v;
    out << "):";
    for (double p : m.factor[fi]) out << " " << format_double(p);
    out << "\n";
  }
  return 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out,
            std::ostream& err) {
  CLI::App app{"factor-graph belief propagation with convergence certificates"};
  app.require_subcommand(1);

  // check
  std::string check_file, check_condition = "all";
  double check_tol = kDefaultSpectralTol;
  bool check_json = false;
  auto* check = app.add_subcommand(
      "check", "evaluate convergence certificates for a factor graph");
  check->add_option("file", check_file, "factor-graph file")->required();
  check->add_option("--condition", check_condition,
                    "which certificate: l1, spectral, ihler or all")
      ->check(CLI::IsMember({"l1", "spectral", "ihler", "all"}));
  check->add_option("--tol", check_tol, "spectral estimator tolerance")
      ->check(CLI::PositiveNumber);
  check->add_flag("--json", check_json, "machine-readable output");

  // run
  std::string run_file, run_beliefs, run_init = "uniform";
  LbpOptions run_opts;
  auto* run = app.add_subcommand("run", "run parallel belief propagation");
  run->add_option("file", run_file, "factor-graph file")->required();
  run->add_option("--max-iter", run_opts.max_iters, "iteration cap")
      ->check(CLI::PositiveNumber);
  run->add_option("--tol", run_opts.tol, "residual threshold")
      ->check(CLI::PositiveNumber);
  run->add_option("--damping", run_opts.damping,
                  "damping in [0,1); certificates say nothing about damped "
                  "updates")
      ->check(CLI::Range(0.0, 0.999999));
  run->add_option("--seed", run_opts.seed, "seed for random initialization");
  run->add_option("--init", run_init, "uniform or random")
      ->check(CLI::IsMember({"uniform", "random"}));
  run->add_option("--beliefs", run_beliefs,
                  "write beliefs to this file in factor-graph form");

  // gen-grid
  GridSpec grid;
  std::string grid_out;
  auto* gen = app.add_subcommand(
      "gen-grid", "generate a random-coupling 2D grid model");
  gen->add_option("--rows", grid.rows)->check(CLI::Range(2, 1 << 20));
  gen->add_option("--cols", grid.cols)->check(CLI::Range(2, 1 << 20));
  gen->add_flag("--periodic,!--no-periodic", grid.periodic,
                "wrap-around edges (default true)");
  gen->add_option("--j0", grid.j0, "mean coupling");
  gen->add_option("--sigma", grid.sigma, "coupling standard deviation")
      ->check(CLI::NonNegativeNumber);
  gen->add_option("--theta", grid.theta, "uniform local field");
  gen->add_option("--seed", grid.seed);
  gen->add_option("-o,--output", grid_out, "output file")->required();

  // sweep
  GridSpec sweep_base;
  std::vector<double> sweep_j0s, sweep_sigmas;
  int sweep_instances = 40, sweep_trials = 1;
  std::string sweep_csv, sweep_svg;
  LbpOptions sweep_opts;
  auto* sweep = app.add_subcommand(
      "sweep", "certificate-versus-empirical sweep over grid ensembles");
  sweep->add_option("--rows", sweep_base.rows)->check(CLI::Range(2, 1 << 20));
  sweep->add_option("--cols", sweep_base.cols)->check(CLI::Range(2, 1 << 20));
  sweep->add_flag("--periodic,!--no-periodic", sweep_base.periodic,
                  "wrap-around edges (default true)");
  sweep->add_option("--theta", sweep_base.theta, "uniform local field");
  sweep->add_option("--j0-list", sweep_j0s, "mean couplings")
      ->required()
      ->delimiter(',');
  sweep->add_option("--sigma-list", sweep_sigmas,
                    "coupling standard deviations")
      ->required()
      ->delimiter(',');
  sweep->add_option("--instances", sweep_instances, "instances per point")
      ->check(CLI::PositiveNumber);
  sweep->add_option("--trials", sweep_trials,
                    "random initializations per instance")
      ->check(CLI::PositiveNumber);
  sweep->add_option("--seed", sweep_base.seed, "base seed");
  sweep->add_option("--max-iter", sweep_opts.max_iters)
      ->check(CLI::PositiveNumber);
  sweep->add_option("--tol", sweep_opts.tol)->check(CLI::PositiveNumber);
  sweep->add_option("--damping", sweep_opts.damping)
      ->check(CLI::Range(0.0, 0.999999));
  sweep->add_option("-o,--output", sweep_csv, "CSV output file")->required();
  sweep->add_option("--svg", sweep_svg, "also write an SVG phase diagram");

  // oracle
  std::string oracle_file;
  auto* oracle = app.add_subcommand(
      "oracle", "exact marginals by brute-force enumeration");
  oracle->add_option("file", oracle_file, "factor-graph file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*check)
      return cmd_check(check_file, check_condition, check_tol, check_json,
                       out, err);
    if (*run) {
      run_opts.init = run_init == "uniform" ? MessageInit::kUniform
                                            : MessageInit::kRandom;
      return cmd_run(run_file, run_opts, run_beliefs, out);
    }
    if (*gen) {
      const FactorGraph g = generate_grid(grid);
      write_file(grid_out, serialize_factor_graph(g));
      return 0;
    }
    if (*sweep) {
      std::vector<GridSpec> specs;
      for (double j0 : sweep_j0s)
        for (double sigma : sweep_sigmas) {
          GridSpec s = sweep_base;
          s.j0 = j0;
          s.sigma = sigma;
          specs.push_back(s);
        }
      const auto rows = run_sweep(specs, sweep_instances, sweep_trials,
                                  sweep_opts);
      std::ostringstream csv;
      emit_csv(rows, csv);
      write_file(sweep_csv, csv.str());
      if (!sweep_svg.empty()) {
        std::ostringstream svg;
        emit_phase_plot(rows, svg);
        write_file(sweep_svg, svg.str());
      }
      return 0;
    }
    if (*oracle) return cmd_oracle(oracle_file, out);
  } catch (const ParseError& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
  return 1;
}

}  // namespace lbpcert
