#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace lbpcert {

/// A single potential over an ordered set of variables.
///
/// The table is stored flat with the FIRST listed variable fastest:
///   index = sum_m state_m * prod_{m'<m} card_{m'}.
/// All entries must be strictly positive and finite.
struct Factor {
  std::vector<int> vars;
  std::vector<double> table;

  bool operator==(const Factor&) const = default;
};

/// Discrete factor graph: variables 0..num_vars-1 with cardinality >= 2,
/// plus strictly positive factor tables. Immutable after construction and
/// safe to share across concurrent readers.
struct FactorGraph {
  int num_vars = 0;
  std::vector<int> cardinalities;
  std::vector<Factor> factors;
  /// Per variable, the indices of incident factors, ascending.
  std::vector<std::vector<int>> var_neighbors;

  bool operator==(const FactorGraph&) const = default;
};

/// Directed factor->variable edge; var is a member of factor.
struct DirectedEdge {
  int factor = 0;
  int var = 0;

  bool operator==(const DirectedEdge&) const = default;
};

/// Builds a validated graph from factor blocks. var_neighbors is derived.
/// Throws std::invalid_argument on any violated invariant: out-of-range or
/// duplicate variable ids, non-positive/non-finite entries, table length
/// mismatch, cardinality < 2, or a variable with no incident factor.
FactorGraph make_graph(int num_vars, std::vector<int> cardinalities,
                       std::vector<Factor> factors);

/// Table stride per factor position (first position has stride 1).
std::vector<std::size_t> factor_strides(const FactorGraph& g, const Factor& f);

/// One edge per (factor, member variable), ascending factor index then
/// position within the factor's var list. This order is the canonical index
/// space for log messages and the edge matrix.
std::vector<DirectedEdge> directed_edges(const FactorGraph& g);

/// offsets[f] = index of factor f's first directed edge; offsets.back() = |D|.
std::vector<int> factor_edge_offsets(const FactorGraph& g);

/// True iff the bipartite variable-factor incidence graph is acyclic.
bool is_tree(const FactorGraph& g);

/// Exact marginals, one probability table per variable / per factor.
struct Marginals {
  std::vector<std::vector<double>> var;
  std::vector<std::vector<double>> factor;
};

inline constexpr std::uint64_t kDefaultStateCap = std::uint64_t{1} << 20;

/// Exact single-variable and factor marginals by full enumeration of the
/// joint distribution, accumulated in the log domain. Refuses (throws
/// std::runtime_error) when the joint state space exceeds `state_cap`.
Marginals brute_force_marginals(const FactorGraph& g,
                                std::uint64_t state_cap = kDefaultStateCap);

}  // namespace lbpcert
