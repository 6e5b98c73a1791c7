#include "lbpcert/lbp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include "lbpcert/rng.hpp"

namespace lbpcert {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// acc <- log(exp(acc) + exp(x)), stable, acc may start at -inf
inline void log_accum_exp(double& acc, double x) {
  if (acc == kNegInf) {
    acc = x;
    return;
  }
  const double hi = std::max(acc, x);
  const double lo = std::min(acc, x);
  acc = hi + std::log1p(std::exp(lo - hi));
}

inline void gauge_fix(std::vector<double>& v) {
  const double m = *std::max_element(v.begin(), v.end());
  for (double& x : v) x -= m;
}

// (max - min)/2 of the difference vector: the local quotient seminorm
inline double local_seminorm(const std::vector<double>& a,
                             const std::vector<double>& b) {
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (std::size_t s = 0; s < a.size(); ++s) {
    const double d = a[s] - b[s];
    lo = std::min(lo, d);
    hi = std::max(hi, d);
  }
  return 0.5 * (hi - lo);
}

// Precomputed per-graph structure shared by every update step.
struct Workspace {
  std::vector<DirectedEdge> edges;
  std::vector<int> edge_offsets;                  // per factor
  std::vector<std::vector<double>> log_tables;    // per factor
  std::vector<std::vector<std::size_t>> strides;  // per factor position

  explicit Workspace(const FactorGraph& g)
      : edges(directed_edges(g)), edge_offsets(factor_edge_offsets(g)) {
    log_tables.resize(g.factors.size());
    strides.resize(g.factors.size());
    for (std::size_t fi = 0; fi < g.factors.size(); ++fi) {
      const Factor& f = g.factors[fi];
      log_tables[fi].resize(f.table.size());
      for (std::size_t k = 0; k < f.table.size(); ++k)
        log_tables[fi][k] = std::log(f.table[k]);
      strides[fi] = factor_strides(g, f);
    }
  }
};

// Sum of incoming log messages at variable v, excluding factor `exclude`,
// accumulated over incident factors in ascending (canonical) order.
void incoming_sum(const FactorGraph& g, const Workspace& ws,
                  const LogMessages& msgs, int v, int exclude,
                  std::vector<double>& out) {
  out.assign(static_cast<std::size_t>(
                 g.cardinalities[static_cast<std::size_t>(v)]),
             0.0);
  for (int fj : g.var_neighbors[static_cast<std::size_t>(v)]) {
    if (fj == exclude) continue;
    const Factor& f = g.factors[static_cast<std::size_t>(fj)];
    std::size_t pos = 0;
    while (f.vars[pos] != v) ++pos;
    const auto e = static_cast<std::size_t>(
        ws.edge_offsets[static_cast<std::size_t>(fj)] + static_cast<int>(pos));
    const std::vector<double>& lambda = msgs.values[e];
    for (std::size_t s = 0; s < out.size(); ++s) out[s] += lambda[s];
  }
}

void update_into(const FactorGraph& g, const Workspace& ws,
                 const LogMessages& old_msgs, double damping,
                 LogMessages& new_msgs) {
  std::vector<std::vector<double>> in_sums;  // per factor position != target
  std::vector<int> in_pos;
  std::vector<int> state;

  for (std::size_t e = 0; e < ws.edges.size(); ++e) {
    const auto fi = static_cast<std::size_t>(ws.edges[e].factor);
    const Factor& f = g.factors[fi];
    const int target = ws.edges[e].var;
    std::size_t target_pos = 0;
    while (f.vars[target_pos] != target) ++target_pos;

    in_sums.resize(f.vars.size());
    in_pos.clear();
    for (std::size_t m = 0; m < f.vars.size(); ++m) {
      if (m == target_pos) continue;
      incoming_sum(g, ws, old_msgs, f.vars[m], static_cast<int>(fi),
                   in_sums[m]);
      in_pos.push_back(static_cast<int>(m));
    }

    std::vector<double>& out = new_msgs.values[e];
    out.assign(static_cast<std::size_t>(
                   g.cardinalities[static_cast<std::size_t>(target)]),
               kNegInf);

    // walk the table in index order; the odometer tracks member states
    const std::vector<double>& logpsi = ws.log_tables[fi];
    state.assign(f.vars.size(), 0);
    for (std::size_t idx = 0; idx < logpsi.size(); ++idx) {
      double term = logpsi[idx];
      for (int m : in_pos)
        term += in_sums[static_cast<std::size_t>(m)]
                       [static_cast<std::size_t>(state[static_cast<std::size_t>(m)])];
      log_accum_exp(out[static_cast<std::size_t>(state[target_pos])], term);
      for (std::size_t m = 0; m < f.vars.size(); ++m) {
        if (++state[m] <
            g.cardinalities[static_cast<std::size_t>(f.vars[m])])
          break;
        state[m] = 0;
      }
    }

    if (damping > 0.0) {
      const std::vector<double>& old = old_msgs.values[e];
      for (std::size_t s = 0; s < out.size(); ++s)
        out[s] = (1.0 - damping) * out[s] + damping * old[s];
    }
    gauge_fix(out);
  }
}

void check_layout(const FactorGraph& g, const LogMessages& msgs) {
  const auto edges = directed_edges(g);
  if (msgs.values.size() != edges.size())
    throw std::invalid_argument("message layout does not match the graph");
  for (std::size_t e = 0; e < edges.size(); ++e)
    if (msgs.values[e].size() !=
        static_cast<std::size_t>(
            g.cardinalities[static_cast<std::size_t>(edges[e].var)]))
      throw std::invalid_argument("message layout does not match the graph");
}

}  // namespace

LogMessages init_messages(const FactorGraph& g, MessageInit init,
                          std::uint64_t seed) {
  const auto edges = directed_edges(g);
  LogMessages msgs;
  msgs.values.resize(edges.size());
  std::mt19937_64 gen(seed);
  for (std::size_t e = 0; e < edges.size(); ++e) {
    auto& v = msgs.values[e];
    v.assign(static_cast<std::size_t>(
                 g.cardinalities[static_cast<std::size_t>(edges[e].var)]),
             0.0);
    if (init == MessageInit::kRandom) {
      for (double& x : v) x = uniform_pm1(gen);
      gauge_fix(v);
    }
  }
  return msgs;
}

double quotient_distance(const LogMessages& a, const LogMessages& b,
                         ResidualNorm norm) {
  if (a.values.size() != b.values.size())
    throw std::invalid_argument("message layouts differ");
  double total = 0.0;
  for (std::size_t e = 0; e < a.values.size(); ++e) {
    if (a.values[e].size() != b.values[e].size())
      throw std::invalid_argument("message layouts differ");
    const double local = local_seminorm(a.values[e], b.values[e]);
    total = norm == ResidualNorm::kSum ? total + local
                                       : std::max(total, local);
  }
  return total;
}

std::pair<LogMessages, double> update_parallel(const FactorGraph& g,
                                               const LogMessages& messages,
                                               double damping,
                                               ResidualNorm norm) {
  check_layout(g, messages);
  const Workspace ws(g);
  LogMessages next;
  next.values.resize(messages.values.size());
  update_into(g, ws, messages, damping, next);
  const double residual = quotient_distance(messages, next, norm);
  return {std::move(next), residual};
}

Marginals compute_beliefs(const FactorGraph& g, const LogMessages& messages) {
  check_layout(g, messages);
  const Workspace ws(g);
  Marginals out;

  out.var.resize(static_cast<std::size_t>(g.num_vars));
  std::vector<double> acc;
  for (int v = 0; v < g.num_vars; ++v) {
    incoming_sum(g, ws, messages, v, /*exclude=*/-1, acc);
    const double m = *std::max_element(acc.begin(), acc.end());
    double z = 0.0;
    for (double& x : acc) z += (x = std::exp(x - m));
    for (double& x : acc) x /= z;
    out.var[static_cast<std::size_t>(v)] = acc;
  }

  out.factor.resize(g.factors.size());
  std::vector<std::vector<double>> in_sums;
  std::vector<int> state;
  for (std::size_t fi = 0; fi < g.factors.size(); ++fi) {
    const Factor& f = g.factors[fi];
    in_sums.resize(f.vars.size());
    for (std::size_t m = 0; m < f.vars.size(); ++m)
      incoming_sum(g, ws, messages, f.vars[m], static_cast<int>(fi),
                   in_sums[m]);
    std::vector<double> logb(f.table.size());
    state.assign(f.vars.size(), 0);
    for (std::size_t idx = 0; idx < f.table.size(); ++idx) {
      double t = ws.log_tables[fi][idx];
      for (std::size_t m = 0; m < f.vars.size(); ++m)
        t += in_sums[m][static_cast<std::size_t>(state[m])];
      logb[idx] = t;
      for (std::size_t m = 0; m < f.vars.size(); ++m) {
        if (++state[m] <
            g.cardinalities[static_cast<std::size_t>(f.vars[m])])
          break;
        state[m] = 0;
      }
    }
    const double mx = *std::max_element(logb.begin(), logb.end());
    double z = 0.0;
    for (double& x : logb) z += (x = std::exp(x - mx));
    for (double& x : logb) x /= z;
    out.factor[fi] = std::move(logb);
  }
  return out;
}

LbpResult run_lbp(const FactorGraph& g, const LbpOptions& opts) {
  if (!(opts.tol > 0.0))
    throw std::invalid_argument("tol must be positive");
  if (!(opts.damping >= 0.0 && opts.damping < 1.0))
    throw std::invalid_argument("damping must lie in [0, 1)");
  if (opts.max_iters < 1)
    throw std::invalid_argument("max_iters must be >= 1");

  const Workspace ws(g);
  LbpResult result;
  result.messages = init_messages(g, opts.init, opts.seed);

  LogMessages next;
  next.values.resize(result.messages.values.size());
  for (int it = 1; it <= opts.max_iters; ++it) {
    update_into(g, ws, result.messages, opts.damping, next);
    const double residual =
        quotient_distance(result.messages, next, opts.residual_norm);
    std::swap(result.messages, next);
    result.iterations = it;
    result.final_residual = residual;
    if (residual <= opts.tol) {
      result.converged = true;
      break;
    }
  }

  Marginals beliefs = compute_beliefs(g, result.messages);
  result.var_beliefs = std::move(beliefs.var);
  result.factor_beliefs = std::move(beliefs.factor);
  return result;
}

}  // namespace lbpcert
