#pragma once

#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "lbpcert/edge_matrix.hpp"
#include "lbpcert/factor_graph.hpp"

namespace lbpcert {

/// Binary pairwise model with spins in {-1,+1}: couplings J_ij on unordered
/// pairs and a local field theta_i per variable. State 0 maps to spin -1,
/// state 1 to spin +1.
struct IsingModel {
  int num_vars = 0;
  std::vector<double> fields;
  std::map<std::pair<int, int>, double> couplings;  // key (i, j) with i < j
  std::vector<std::vector<int>> neighbors;          // derived, ascending
};

/// Converts a binary graph with factor arities <= 2 to coupling/field form.
/// For a pair table psi(a,b): J += 1/4 sum_ab s_a s_b log psi, theta_i +=
/// 1/4 sum_ab s_a log psi (symmetrically for j); a single-variable table
/// contributes 1/2 sum_a s_a log psi. Parallel pair factors accumulate into
/// one coupling; constant offsets are dropped.
/// Throws std::invalid_argument on a non-binary variable or arity > 2.
IsingModel to_ising(const FactorGraph& g);

/// Directed variable->variable pairs of the coupling graph: for each i
/// ascending, an edge i->j per neighbor j ascending. Canonical index space
/// for the tanh-parameterized messages.
std::vector<std::pair<int, int>> ising_directed_edges(const IsingModel& m);

/// One parallel update of the tanh-parameterized messages: for each edge
/// (j->i), nu~ = atanh(tanh(J_ij) * tanh(theta_j + sum_{k in N_j\i} nu_{k->j})),
/// the product clamped to [-1+1e-15, 1-1e-15] before atanh.
std::vector<double> binary_update(const IsingModel& m,
                                  std::span<const double> nu);

/// Coupling strength of a factor between two of its member positions:
/// the supremum over state pairs of tanh of a quarter of the log cross
/// ratio, computed by exhaustive enumeration. `cards` holds the cardinality
/// of each factor position. Always in [0, 1) for positive finite tables.
double strength_n(std::span<const double> table, std::span<const int> cards,
                  int pos_i, int pos_j);

/// Graph-level variant addressing the factor's members by variable id.
/// Throws std::invalid_argument unless var_i and var_j are distinct members.
double strength_n(const FactorGraph& g, int factor_index, int var_i,
                  int var_j);

/// Dynamic-range strength of a pair factor: tanh of half the spread of the
/// log table. Never smaller than strength_n on the same table.
double strength_d_pairwise(std::span<const double> table);
double strength_d_pairwise(const FactorGraph& g, int factor_index);

/// Outcome of one convergence certificate. A pass guarantees convergence to
/// a unique fixed point from any initialization; a fail is inconclusive.
struct CertificateReport {
  std::string condition;  // l1-binary | spectral-binary | l1-general |
                          // spectral-general | ihler-pairwise
  double value = 0.0;     // the quantity compared against 1
  bool pass = false;
  std::string detail;     // worst edge and its contributors
};

/// Column-norm certificate on the coupling graph:
/// value = max_l max_{k in N_l} sum_{i in N_l\k} tanh|J_il|.
CertificateReport l1_condition_binary(const IsingModel& m);

/// Column-norm certificate on an arbitrary graph: the maximum over directed
/// edges (J->j) with |J| >= 2 of sum over factors I in N_j\J, members
/// i in I\j, of strength_n(psi_I, i, j). Single-variable factors emit
/// constant messages, so their columns are excluded from the bound.
CertificateReport l1_condition_general(const FactorGraph& g);

/// Same column-norm bound with strength_n replaced by the pair dynamic
/// range; requires every factor arity <= 2 (throws otherwise). Weaker than
/// l1_condition_general but cheaper folklore baseline.
CertificateReport ihler_condition_pairwise(const FactorGraph& g);

/// Message-dependency bound matrix over directed edges: entry
/// (I->i, J->j) = strength_n(psi_I, i, j) when j is in I\i and J in N_j\I
/// and |J| >= 2 (constant-message columns are zeroed; this changes neither
/// the spectral radius nor the relevant column norms). Nilpotent whenever
/// the graph is a tree. For binary pairwise graphs the nonzero entries
/// equal tanh|J_ij| on the non-backtracking structure.
EdgeMatrix bound_matrix(const FactorGraph& g);

/// All variables binary and all factor arities <= 2.
bool is_binary_pairwise(const FactorGraph& g);

/// is_binary_pairwise and no two pair factors over the same variable pair.
bool is_simple_binary_pairwise(const FactorGraph& g);

}  // namespace lbpcert
