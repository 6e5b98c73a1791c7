#include "lbpcert/certificates.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace lbpcert {

bool is_binary_pairwise(const FactorGraph& g) {
  for (int c : g.cardinalities)
    if (c != 2) return false;
  for (const Factor& f : g.factors)
    if (f.vars.size() > 2) return false;
  return true;
}

bool is_simple_binary_pairwise(const FactorGraph& g) {
  if (!is_binary_pairwise(g)) return false;
  std::vector<std::pair<int, int>> pairs;
  for (const Factor& f : g.factors) {
    if (f.vars.size() != 2) continue;
    pairs.emplace_back(std::min(f.vars[0], f.vars[1]),
                       std::max(f.vars[0], f.vars[1]));
  }
  std::sort(pairs.begin(), pairs.end());
  return std::adjacent_find(pairs.begin(), pairs.end()) == pairs.end();
}

IsingModel to_ising(const FactorGraph& g) {
  for (int v = 0; v < g.num_vars; ++v)
    if (g.cardinalities[static_cast<std::size_t>(v)] != 2)
      throw std::invalid_argument("variable " + std::to_string(v) +
                                  " is not binary");

  IsingModel m;
  m.num_vars = g.num_vars;
  m.fields.assign(static_cast<std::size_t>(g.num_vars), 0.0);

  for (std::size_t fi = 0; fi < g.factors.size(); ++fi) {
    const Factor& f = g.factors[fi];
    if (f.vars.size() == 1) {
      const double l0 = std::log(f.table[0]);
      const double l1 = std::log(f.table[1]);
      m.fields[static_cast<std::size_t>(f.vars[0])] += 0.5 * (l1 - l0);
    } else if (f.vars.size() == 2) {
      // table index a + 2b, spins s = 2*state - 1
      const double l00 = std::log(f.table[0]);
      const double l10 = std::log(f.table[1]);
      const double l01 = std::log(f.table[2]);
      const double l11 = std::log(f.table[3]);
      const int i = f.vars[0], j = f.vars[1];
      const double coupling = 0.25 * (l00 - l10 - l01 + l11);
      m.fields[static_cast<std::size_t>(i)] +=
          0.25 * (-l00 + l10 - l01 + l11);
      m.fields[static_cast<std::size_t>(j)] +=
          0.25 * (-l00 - l10 + l01 + l11);
      m.couplings[{std::min(i, j), std::max(i, j)}] += coupling;
    } else {
      throw std::invalid_argument("factor " + std::to_string(fi) +
                                  " has arity " +
                                  std::to_string(f.vars.size()) +
                                  "; the binary view requires arity <= 2");
    }
  }

  m.neighbors.assign(static_cast<std::size_t>(m.num_vars), {});
  for (const auto& [key, value] : m.couplings) {
    m.neighbors[static_cast<std::size_t>(key.first)].push_back(key.second);
    m.neighbors[static_cast<std::size_t>(key.second)].push_back(key.first);
  }
  for (auto& nb : m.neighbors) std::sort(nb.begin(), nb.end());
  return m;
}

std::vector<std::pair<int, int>> ising_directed_edges(const IsingModel& m) {
  std::vector<std::pair<int, int>> edges;
  for (int i = 0; i < m.num_vars; ++i)
    for (int j : m.neighbors[static_cast<std::size_t>(i)])
      edges.emplace_back(i, j);
  return edges;
}

namespace {

// index of directed pair edge (i -> j) in ising_directed_edges order
struct IsingEdgeIndex {
  std::vector<int> offsets;
  const IsingModel* model;

  explicit IsingEdgeIndex(const IsingModel& m) : model(&m) {
    offsets.assign(static_cast<std::size_t>(m.num_vars) + 1, 0);
    for (int i = 0; i < m.num_vars; ++i)
      offsets[static_cast<std::size_t>(i) + 1] =
          offsets[static_cast<std::size_t>(i)] +
          static_cast<int>(m.neighbors[static_cast<std::size_t>(i)].size());
  }

  int operator()(int i, int j) const {
    const auto& nb = model->neighbors[static_cast<std::size_t>(i)];
    const auto it = std::lower_bound(nb.begin(), nb.end(), j);
    return offsets[static_cast<std::size_t>(i)] +
           static_cast<int>(it - nb.begin());
  }
};

double coupling_of(const IsingModel& m, int a, int b) {
  return m.couplings.at({std::min(a, b), std::max(a, b)});
}

}  // namespace

std::vector<double> binary_update(const IsingModel& m,
                                  std::span<const double> nu) {
  const auto edges = ising_directed_edges(m);
  if (nu.size() != edges.size())
    throw std::invalid_argument("message vector does not match the edge set");
  const IsingEdgeIndex index(m);

  constexpr double kClamp = 1.0 - 1e-15;
  std::vector<double> out(edges.size());
  for (std::size_t e = 0; e < edges.size(); ++e) {
    const auto [sender, receiver] = edges[e];
    double total = m.fields[static_cast<std::size_t>(sender)];
    for (int k : m.neighbors[static_cast<std::size_t>(sender)]) {
      if (k == receiver) continue;
      total += nu[static_cast<std::size_t>(index(k, sender))];
    }
    double p = std::tanh(coupling_of(m, sender, receiver)) * std::tanh(total);
    p = std::clamp(p, -kClamp, kClamp);
    out[e] = std::atanh(p);
  }
  return out;
}

double strength_n(std::span<const double> table, std::span<const int> cards,
                  int pos_i, int pos_j) {
  const int arity = static_cast<int>(cards.size());
  if (pos_i == pos_j || pos_i < 0 || pos_j < 0 || pos_i >= arity ||
      pos_j >= arity)
    throw std::invalid_argument(
        "strength_n needs two distinct member positions");

  std::size_t expected = 1;
  for (int c : cards) expected *= static_cast<std::size_t>(c);
  if (table.size() != expected)
    throw std::invalid_argument("table length does not match cardinalities");

  std::vector<double> logt(table.size());
  for (std::size_t k = 0; k < table.size(); ++k) logt[k] = std::log(table[k]);

  std::vector<std::size_t> strides(cards.size());
  std::size_t s = 1;
  for (std::size_t m = 0; m < cards.size(); ++m) {
    strides[m] = s;
    s *= static_cast<std::size_t>(cards[m]);
  }
  const std::size_t stride_i = strides[static_cast<std::size_t>(pos_i)];
  const std::size_t stride_j = strides[static_cast<std::size_t>(pos_j)];
  const int ci = cards[static_cast<std::size_t>(pos_i)];
  const int cj = cards[static_cast<std::size_t>(pos_j)];

  // base indices of every assignment to the remaining positions
  std::vector<std::size_t> rest{0};
  for (std::size_t m = 0; m < cards.size(); ++m) {
    if (static_cast<int>(m) == pos_i || static_cast<int>(m) == pos_j)
      continue;
    std::vector<std::size_t> grown;
    grown.reserve(rest.size() * static_cast<std::size_t>(cards[m]));
    for (int st = 0; st < cards[m]; ++st)
      for (std::size_t base : rest)
        grown.push_back(base + static_cast<std::size_t>(st) * strides[m]);
    rest = std::move(grown);
  }

  // exhaustive sup of the log cross ratio
  //   log psi(a,b,g) + log psi(a',b',g') - log psi(a',b,g) - log psi(a,b',g')
  double best = -std::numeric_limits<double>::infinity();
  for (int a = 0; a < ci; ++a)
    for (int a2 = 0; a2 < ci; ++a2) {
      if (a2 == a) continue;
      for (int b = 0; b < cj; ++b)
        for (int b2 = 0; b2 < cj; ++b2) {
          if (b2 == b) continue;
          for (std::size_t gi : rest)
            for (std::size_t gj : rest) {
              const double val =
                  logt[gi + static_cast<std::size_t>(a) * stride_i +
                       static_cast<std::size_t>(b) * stride_j] +
                  logt[gj + static_cast<std::size_t>(a2) * stride_i +
                       static_cast<std::size_t>(b2) * stride_j] -
                  logt[gi + static_cast<std::size_t>(a2) * stride_i +
                       static_cast<std::size_t>(b) * stride_j] -
                  logt[gj + static_cast<std::size_t>(a) * stride_i +
                       static_cast<std::size_t>(b2) * stride_j];
              best = std::max(best, val);
            }
        }
    }
  return std::tanh(0.25 * best);
}

namespace {

std::vector<int> member_cards(const FactorGraph& g, const Factor& f) {
  std::vector<int> cards(f.vars.size());
  for (std::size_t m = 0; m < f.vars.size(); ++m)
    cards[m] = g.cardinalities[static_cast<std::size_t>(f.vars[m])];
  return cards;
}

int member_position(const Factor& f, int var, const char* ctx) {
  for (std::size_t m = 0; m < f.vars.size(); ++m)
    if (f.vars[m] == var) return static_cast<int>(m);
  throw std::invalid_argument(std::string(ctx) + ": variable " +
                              std::to_string(var) +
                              " is not a member of the factor");
}

}  // namespace

double strength_n(const FactorGraph& g, int factor_index, int var_i,
                  int var_j) {
  const Factor& f = g.factors.at(static_cast<std::size_t>(factor_index));
  const auto cards = member_cards(g, f);
  return strength_n(f.table, cards, member_position(f, var_i, "strength_n"),
                    member_position(f, var_j, "strength_n"));
}

double strength_d_pairwise(std::span<const double> table) {
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (double x : table) {
    const double l = std::log(x);
    lo = std::min(lo, l);
    hi = std::max(hi, l);
  }
  return std::tanh(0.5 * (hi - lo));
}

double strength_d_pairwise(const FactorGraph& g, int factor_index) {
  const Factor& f = g.factors.at(static_cast<std::size_t>(factor_index));
  if (f.vars.size() != 2)
    throw std::invalid_argument(
        "the dynamic-range strength is defined for pair factors only");
  return strength_d_pairwise(f.table);
}

CertificateReport l1_condition_binary(const IsingModel& m) {
  CertificateReport report;
  report.condition = "l1-binary";
  report.value = 0.0;
  report.detail = "no pair couplings";

  for (int l = 0; l < m.num_vars; ++l) {
    const auto& nb = m.neighbors[static_cast<std::size_t>(l)];
    for (int k : nb) {
      double sum = 0.0;
      for (int i : nb) {
        if (i == k) continue;
        sum += std::tanh(std::abs(coupling_of(m, i, l)));
      }
      if (sum > report.value) {
        report.value = sum;
        report.detail = "worst column: message " + std::to_string(k) +
                        "->" + std::to_string(l) + " feeding " +
                        std::to_string(nb.size() - 1) + " outgoing edges";
      }
    }
  }
  report.pass = report.value < 1.0;
  return report;
}

namespace {

// strength_n per (factor, ordered member position pair), computed on demand
class StrengthCache {
 public:
  explicit StrengthCache(const FactorGraph& g) : g_(&g) {
    cache_.resize(g.factors.size());
  }

  double get(int fi, int pos_i, int pos_j) {
    auto& c = cache_[static_cast<std::size_t>(fi)];
    const Factor& f = g_->factors[static_cast<std::size_t>(fi)];
    const std::size_t arity = f.vars.size();
    if (c.empty()) c.assign(arity * arity, -1.0);
    auto& slot = c[static_cast<std::size_t>(pos_i) * arity +
                   static_cast<std::size_t>(pos_j)];
    if (slot < 0.0) {
      const auto cards = member_cards(*g_, f);
      slot = strength_n(f.table, cards, pos_i, pos_j);
    }
    return slot;
  }

 private:
  const FactorGraph* g_;
  std::vector<std::vector<double>> cache_;
};

// Shared column scan for the l1-style conditions: for every directed edge
// (J->j) whose source factor has arity >= 2 (constant-message columns are
// irrelevant to convergence), sums term(I, pos_i, pos_j) over incident
// factors I != J and members i != j.
template <typename Term>
CertificateReport column_norm_condition(const FactorGraph& g,
                                        const char* condition, Term term) {
  CertificateReport report;
  report.condition = condition;
  report.value = 0.0;
  report.detail = "no applicable columns";

  for (std::size_t ji = 0; ji < g.factors.size(); ++ji) {
    const Factor& source = g.factors[ji];
    if (source.vars.size() < 2) continue;
    for (int j : source.vars) {
      double sum = 0.0;
      for (int fi : g.var_neighbors[static_cast<std::size_t>(j)]) {
        if (fi == static_cast<int>(ji)) continue;
        const Factor& f = g.factors[static_cast<std::size_t>(fi)];
        const int pos_j = member_position(f, j, "column_norm_condition");
        for (std::size_t m = 0; m < f.vars.size(); ++m) {
          if (static_cast<int>(m) == pos_j) continue;
          sum += term(fi, static_cast<int>(m), pos_j);
        }
      }
      if (sum > report.value) {
        report.value = sum;
        report.detail = "worst column: factor " + std::to_string(ji) +
                        " -> variable " + std::to_string(j);
      }
    }
  }
  report.pass = report.value < 1.0;
  return report;
}

}  // namespace

CertificateReport l1_condition_general(const FactorGraph& g) {
  StrengthCache cache(g);
  return column_norm_condition(
      g, "l1-general",
      [&](int fi, int pos_i, int pos_j) { return cache.get(fi, pos_i, pos_j); });
}

CertificateReport ihler_condition_pairwise(const FactorGraph& g) {
  std::vector<double> strengths(g.factors.size(), 0.0);
  for (std::size_t fi = 0; fi < g.factors.size(); ++fi) {
    const Factor& f = g.factors[fi];
    if (f.vars.size() > 2)
      throw std::invalid_argument(
          "the dynamic-range condition requires factor arities <= 2");
    if (f.vars.size() == 2) strengths[fi] = strength_d_pairwise(f.table);
  }
  return column_norm_condition(g, "ihler-pairwise",
                               [&](int fi, int, int) {
                                 return strengths[static_cast<std::size_t>(fi)];
                               });
}

EdgeMatrix bound_matrix(const FactorGraph& g) {
  const auto edges = directed_edges(g);
  const auto offsets = factor_edge_offsets(g);
  StrengthCache cache(g);

  EdgeMatrix a;
  a.dim = edges.size();
  for (std::size_t r = 0; r < edges.size(); ++r) {
    const auto fi = static_cast<std::size_t>(edges[r].factor);
    const Factor& f = g.factors[fi];
    if (f.vars.size() < 2) continue;  // constant message, zero row
    const int i = edges[r].var;
    const int pos_i = member_position(f, i, "bound_matrix");
    for (std::size_t m = 0; m < f.vars.size(); ++m) {
      if (static_cast<int>(m) == pos_i) continue;
      const int j = f.vars[m];
      const double value = cache.get(static_cast<int>(fi), pos_i,
                                     static_cast<int>(m));
      for (int ki : g.var_neighbors[static_cast<std::size_t>(j)]) {
        if (ki == static_cast<int>(fi)) continue;
        const Factor& k = g.factors[static_cast<std::size_t>(ki)];
        if (k.vars.size() < 2) continue;  // constant message, zero column
        const int pos_jk = member_position(k, j, "bound_matrix");
        a.entries.push_back({static_cast<int>(r),
                             offsets[static_cast<std::size_t>(ki)] + pos_jk,
                             value});
      }
    }
  }
  return a;
}

}  // namespace lbpcert
