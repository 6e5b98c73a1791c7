#include "lbpcert/factor_graph.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

namespace lbpcert {

namespace {

[[noreturn]] void fail(const std::string& msg) {
  throw std::invalid_argument(msg);
}

}  // namespace

FactorGraph make_graph(int num_vars, std::vector<int> cardinalities,
                       std::vector<Factor> factors) {
  if (num_vars < 0) fail("num_vars must be >= 0");
  if (static_cast<int>(cardinalities.size()) != num_vars)
    fail("cardinalities size does not match num_vars");
  for (int v = 0; v < num_vars; ++v) {
    if (cardinalities[v] < 2)
      fail("variable " + std::to_string(v) + " has cardinality " +
           std::to_string(cardinalities[v]) + " (minimum is 2)");
  }

  FactorGraph g;
  g.num_vars = num_vars;
  g.cardinalities = std::move(cardinalities);
  g.factors = std::move(factors);
  g.var_neighbors.assign(static_cast<std::size_t>(num_vars), {});

  for (std::size_t fi = 0; fi < g.factors.size(); ++fi) {
    const Factor& f = g.factors[fi];
    if (f.vars.empty())
      fail("factor " + std::to_string(fi) + " references no variables");
    std::size_t expected = 1;
    std::vector<bool> seen(static_cast<std::size_t>(num_vars), false);
    for (int v : f.vars) {
      if (v < 0 || v >= num_vars)
        fail("factor " + std::to_string(fi) + " references variable " +
             std::to_string(v) + " outside [0, " + std::to_string(num_vars) +
             ")");
      if (seen[static_cast<std::size_t>(v)])
        fail("factor " + std::to_string(fi) + " lists variable " +
             std::to_string(v) + " twice");
      seen[static_cast<std::size_t>(v)] = true;
      expected *= static_cast<std::size_t>(g.cardinalities[v]);
    }
    if (f.table.size() != expected)
      fail("factor " + std::to_string(fi) + " table has " +
           std::to_string(f.table.size()) + " entries, expected " +
           std::to_string(expected));
    for (std::size_t k = 0; k < f.table.size(); ++k) {
      const double x = f.table[k];
      if (!(x > 0.0) || !std::isfinite(x))
        fail("factor " + std::to_string(fi) + " entry " + std::to_string(k) +
             " is not strictly positive and finite");
    }
    for (int v : f.vars)
      g.var_neighbors[static_cast<std::size_t>(v)].push_back(
          static_cast<int>(fi));
  }

  for (int v = 0; v < num_vars; ++v) {
    if (g.var_neighbors[static_cast<std::size_t>(v)].empty())
      fail("variable " + std::to_string(v) + " has no incident factor");
  }
  return g;
}

std::vector<std::size_t> factor_strides(const FactorGraph& g,
                                        const Factor& f) {
  std::vector<std::size_t> strides(f.vars.size());
  std::size_t s = 1;
  for (std::size_t m = 0; m < f.vars.size(); ++m) {
    strides[m] = s;
    s *= static_cast<std::size_t>(
        g.cardinalities[static_cast<std::size_t>(f.vars[m])]);
  }
  return strides;
}

std::vector<DirectedEdge> directed_edges(const FactorGraph& g) {
  std::vector<DirectedEdge> edges;
  for (std::size_t fi = 0; fi < g.factors.size(); ++fi)
    for (int v : g.factors[fi].vars)
      edges.push_back({static_cast<int>(fi), v});
  return edges;
}

std::vector<int> factor_edge_offsets(const FactorGraph& g) {
  std::vector<int> offsets(g.factors.size() + 1, 0);
  for (std::size_t fi = 0; fi < g.factors.size(); ++fi)
    offsets[fi + 1] =
        offsets[fi] + static_cast<int>(g.factors[fi].vars.size());
  return offsets;
}

namespace {

// union-find over variable nodes [0, N) and factor nodes [N, N+F)
struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(int n) : parent(static_cast<std::size_t>(n)) {
    std::iota(parent.begin(), parent.end(), 0);
  }
  int find(int x) {
    while (parent[static_cast<std::size_t>(x)] != x) {
      parent[static_cast<std::size_t>(x)] =
          parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
      x = parent[static_cast<std::size_t>(x)];
    }
    return x;
  }
  // returns false if already joined
  bool join(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    parent[static_cast<std::size_t>(a)] = b;
    return true;
  }
};

}  // namespace

bool is_tree(const FactorGraph& g) {
  UnionFind uf(g.num_vars + static_cast<int>(g.factors.size()));
  for (std::size_t fi = 0; fi < g.factors.size(); ++fi) {
    const int fnode = g.num_vars + static_cast<int>(fi);
    for (int v : g.factors[fi].vars)
      if (!uf.join(v, fnode)) return false;
  }
  return true;
}

Marginals brute_force_marginals(const FactorGraph& g,
                                std::uint64_t state_cap) {
  std::uint64_t total = 1;
  for (int c : g.cardinalities) {
    total *= static_cast<std::uint64_t>(c);
    if (total > state_cap)
      throw std::runtime_error(
          "joint state space exceeds enumeration cap of " +
          std::to_string(state_cap) + " states");
  }

  Marginals out;
  out.var.resize(static_cast<std::size_t>(g.num_vars));
  for (int v = 0; v < g.num_vars; ++v)
    out.var[static_cast<std::size_t>(v)].assign(
        static_cast<std::size_t>(g.cardinalities[static_cast<std::size_t>(v)]),
        0.0);
  out.factor.resize(g.factors.size());
  for (std::size_t fi = 0; fi < g.factors.size(); ++fi)
    out.factor[fi].assign(g.factors[fi].table.size(), 0.0);
  if (g.num_vars == 0) return out;

  std::vector<std::vector<double>> log_tables(g.factors.size());
  std::vector<std::vector<std::size_t>> strides(g.factors.size());
  for (std::size_t fi = 0; fi < g.factors.size(); ++fi) {
    log_tables[fi].resize(g.factors[fi].table.size());
    for (std::size_t k = 0; k < g.factors[fi].table.size(); ++k)
      log_tables[fi][k] = std::log(g.factors[fi].table[k]);
    strides[fi] = factor_strides(g, g.factors[fi]);
  }

  // pass 1: log weight per joint configuration (the global max is needed
  // before anything can be exponentiated)
  std::vector<int> state(static_cast<std::size_t>(g.num_vars), 0);
  std::vector<double> logw(total);
  double max_logw = -std::numeric_limits<double>::infinity();
  for (std::uint64_t cfg = 0;; ++cfg) {
    double lw = 0.0;
    for (std::size_t fi = 0; fi < g.factors.size(); ++fi) {
      const Factor& f = g.factors[fi];
      std::size_t idx = 0;
      for (std::size_t m = 0; m < f.vars.size(); ++m)
        idx += static_cast<std::size_t>(
                   state[static_cast<std::size_t>(f.vars[m])]) *
               strides[fi][m];
      lw += log_tables[fi][idx];
    }
    logw[cfg] = lw;
    max_logw = std::max(max_logw, lw);

    int v = 0;
    for (; v < g.num_vars; ++v) {
      if (++state[static_cast<std::size_t>(v)] <
          g.cardinalities[static_cast<std::size_t>(v)])
        break;
      state[static_cast<std::size_t>(v)] = 0;
    }
    if (v == g.num_vars) break;
  }

  // pass 2: accumulate normalized weights into the marginal tables
  std::fill(state.begin(), state.end(), 0);
  double z = 0.0;
  for (std::uint64_t cfg = 0;; ++cfg) {
    const double w = std::exp(logw[cfg] - max_logw);
    z += w;
    for (int v = 0; v < g.num_vars; ++v)
      out.var[static_cast<std::size_t>(v)]
             [static_cast<std::size_t>(state[static_cast<std::size_t>(v)])] +=
          w;
    for (std::size_t fi = 0; fi < g.factors.size(); ++fi) {
      const Factor& f = g.factors[fi];
      std::size_t idx = 0;
      for (std::size_t m = 0; m < f.vars.size(); ++m)
        idx += static_cast<std::size_t>(
                   state[static_cast<std::size_t>(f.vars[m])]) *
               strides[fi][m];
      out.factor[fi][idx] += w;
    }
    int v = 0;
    for (; v < g.num_vars; ++v) {
      if (++state[static_cast<std::size_t>(v)] <
          g.cardinalities[static_cast<std::size_t>(v)])
        break;
      state[static_cast<std::size_t>(v)] = 0;
    }
    if (v == g.num_vars) break;
  }

  for (auto& t : out.var)
    for (double& p : t) p /= z;
  for (auto& t : out.factor)
    for (double& p : t) p /= z;
  return out;
}

}  // namespace lbpcert
