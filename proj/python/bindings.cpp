#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "lbpcert/certificates.hpp"
#include "lbpcert/experiments.hpp"
#include "lbpcert/factor_graph.hpp"
#include "lbpcert/lbp.hpp"
#include "lbpcert/spectral.hpp"
#include "lbpcert/text_format.hpp"

namespace py = pybind11;
using namespace lbpcert;

namespace {

py::dict report_dict(const CertificateReport& r) {
  py::dict d;
  d["condition"] = r.condition;
  d["value"] = r.value;
  d["pass"] = r.pass;
  d["detail"] = r.detail;
  return d;
}

LbpOptions make_options(int max_iters, double tol, double damping,
                        const std::string& init, std::uint64_t seed) {
  LbpOptions opts;
  opts.max_iters = max_iters;
  opts.tol = tol;
  opts.damping = damping;
  opts.seed = seed;
  if (init == "uniform")
    opts.init = MessageInit::kUniform;
  else if (init == "random")
    opts.init = MessageInit::kRandom;
  else
    throw std::invalid_argument("init must be 'uniform' or 'random'");
  return opts;
}

}  // namespace

PYBIND11_MODULE(_lbpcert, m) {
  m.doc() = "loopy belief propagation with convergence certificates";

  py::class_<FactorGraph>(m, "FactorGraph")
      .def_readonly("num_vars", &FactorGraph::num_vars)
      .def_readonly("cardinalities", &FactorGraph::cardinalities)
      .def_property_readonly(
          "num_factors",
          [](const FactorGraph& g) { return g.factors.size(); })
      .def("factor_vars",
           [](const FactorGraph& g, std::size_t i) {
             return g.factors.at(i).vars;
           })
      .def("factor_table",
           [](const FactorGraph& g, std::size_t i) {
             return g.factors.at(i).table;
           })
      .def("__eq__",
           [](const FactorGraph& a, const FactorGraph& b) { return a == b; })
      .def("__repr__", [](const FactorGraph& g) {
        std::ostringstream s;
        s << "FactorGraph(num_vars=" << g.num_vars
          << ", num_factors=" << g.factors.size() << ")";
        return s.str();
      });

  m.def("make_graph",
        [](int num_vars, std::vector<int> cards,
           std::vector<std::pair<std::vector<int>, std::vector<double>>>
               factors) {
          std::vector<Factor> fs;
          fs.reserve(factors.size());
          for (auto& [vars, table] : factors)
            fs.push_back({std::move(vars), std::move(table)});
          return make_graph(num_vars, std::move(cards), std::move(fs));
        },
        py::arg("num_vars"), py::arg("cardinalities"), py::arg("factors"),
        "build a graph from (vars, table) factor pairs");

  m.def("parse_factor_graph",
        [](const std::string& text) { return parse_factor_graph(text); },
        py::arg("text"));
  m.def("serialize_factor_graph",
        [](const FactorGraph& g) { return serialize_factor_graph(g); },
        py::arg("graph"));
  m.def("is_tree", &is_tree, py::arg("graph"));
  m.def("directed_edges",
        [](const FactorGraph& g) {
          std::vector<std::pair<int, int>> out;
          for (const auto& e : directed_edges(g))
            out.emplace_back(e.factor, e.var);
          return out;
        },
        py::arg("graph"));

  m.def("brute_force_marginals",
        [](const FactorGraph& g, std::uint64_t cap) {
          const Marginals mg = brute_force_marginals(g, cap);
          return py::make_tuple(mg.var, mg.factor);
        },
        py::arg("graph"), py::arg("state_cap") = kDefaultStateCap,
        "exact (variable, factor) marginals by enumeration");

  m.def("run_lbp",
        [](const FactorGraph& g, int max_iters, double tol, double damping,
           const std::string& init, std::uint64_t seed) {
          const LbpResult r =
              run_lbp(g, make_options(max_iters, tol, damping, init, seed));
          py::dict d;
          d["converged"] = r.converged;
          d["iterations"] = r.iterations;
          d["final_residual"] = r.final_residual;
          d["var_beliefs"] = r.var_beliefs;
          d["factor_beliefs"] = r.factor_beliefs;
          d["messages"] = r.messages.values;
          return d;
        },
        py::arg("graph"), py::arg("max_iters") = 10000,
        py::arg("tol") = 1e-9, py::arg("damping") = 0.0,
        py::arg("init") = "uniform", py::arg("seed") = 0);

  m.def("strength_n",
        [](const FactorGraph& g, int factor, int var_i, int var_j) {
          return strength_n(g, factor, var_i, var_j);
        },
        py::arg("graph"), py::arg("factor"), py::arg("var_i"),
        py::arg("var_j"));
  m.def("strength_d_pairwise",
        [](const FactorGraph& g, int factor) {
          return strength_d_pairwise(g, factor);
        },
        py::arg("graph"), py::arg("factor"));

  m.def("l1_condition",
        [](const FactorGraph& g) {
          return report_dict(l1_condition_general(g));
        },
        py::arg("graph"));
  m.def("spectral_condition",
        [](const FactorGraph& g, double tol, int max_iters) {
          return report_dict(spectral_condition(g, tol, max_iters));
        },
        py::arg("graph"), py::arg("tol") = kDefaultSpectralTol,
        py::arg("max_iters") = kDefaultSpectralIters);
  m.def("ihler_condition",
        [](const FactorGraph& g) {
          return report_dict(ihler_condition_pairwise(g));
        },
        py::arg("graph"));

  m.def("bound_matrix",
        [](const FactorGraph& g) {
          const EdgeMatrix a = bound_matrix(g);
          std::vector<std::tuple<int, int, double>> entries;
          entries.reserve(a.entries.size());
          for (const auto& e : a.entries)
            entries.emplace_back(e.row, e.col, e.value);
          return py::make_tuple(a.dim, entries);
        },
        py::arg("graph"), "(dim, [(row, col, value), ...])");
  m.def("spectral_radius",
        [](std::size_t dim, std::vector<std::tuple<int, int, double>> entries,
           double tol, int max_iters) {
          EdgeMatrix a;
          a.dim = dim;
          for (auto& [r, c, v] : entries) a.entries.push_back({r, c, v});
          const SpectralEstimate est = spectral_radius(a, tol, max_iters);
          py::dict d;
          d["rho"] = est.rho;
          d["iterations"] = est.iterations;
          d["converged"] = est.converged;
          d["residual"] = est.residual;
          return d;
        },
        py::arg("dim"), py::arg("entries"),
        py::arg("tol") = kDefaultSpectralTol,
        py::arg("max_iters") = kDefaultSpectralIters);

  m.def("generate_grid",
        [](int rows, int cols, bool periodic, double j0, double sigma,
           double theta, std::uint64_t seed) {
          GridSpec spec;
          spec.rows = rows;
          spec.cols = cols;
          spec.periodic = periodic;
          spec.j0 = j0;
          spec.sigma = sigma;
          spec.theta = theta;
          spec.seed = seed;
          return generate_grid(spec);
        },
        py::arg("rows"), py::arg("cols"), py::arg("periodic") = true,
        py::arg("j0") = 0.0, py::arg("sigma") = 0.0, py::arg("theta") = 0.0,
        py::arg("seed") = 0);

  m.attr("__version__") = "0.1.0";
}
