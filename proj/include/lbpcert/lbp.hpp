#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "lbpcert/factor_graph.hpp"

namespace lbpcert {

/// Log-domain messages, one real vector per directed factor->variable edge
/// in the canonical directed_edges order. Messages are defined up to a
/// per-edge constant shift; the canonical representative has maximum
/// component 0 in every vector.
struct LogMessages {
  std::vector<std::vector<double>> values;
};

enum class MessageInit { kUniform, kRandom };

/// Residual aggregation across edges: sum of the local quotient seminorms
/// (the default global norm) or their maximum.
enum class ResidualNorm { kSum, kMax };

struct LbpOptions {
  int max_iters = 10000;
  double tol = 1e-9;
  /// Damping weight on the previous messages. Plumbing only: none of the
  /// convergence certificates make claims about damped updates.
  double damping = 0.0;
  MessageInit init = MessageInit::kUniform;
  std::uint64_t seed = 0;
  ResidualNorm residual_norm = ResidualNorm::kSum;
};

struct LbpResult {
  bool converged = false;
  int iterations = 0;
  double final_residual = 0.0;
  LogMessages messages;
  std::vector<std::vector<double>> var_beliefs;
  std::vector<std::vector<double>> factor_beliefs;
};

/// kUniform: all-zero vectors. kRandom: entries i.i.d. uniform in [-1, 1)
/// drawn in canonical edge/state order from mt19937_64(seed), then gauge
/// fixed. Same seed, same messages, bit for bit.
LogMessages init_messages(const FactorGraph& g, MessageInit init,
                          std::uint64_t seed = 0);

/// Global quotient distance between two message sets on the same layout:
/// per edge the local seminorm (max - min)/2 of the difference vector,
/// aggregated across edges. Insensitive to per-edge constant shifts.
/// Throws std::invalid_argument on layout mismatch.
double quotient_distance(const LogMessages& a, const LogMessages& b,
                         ResidualNorm norm = ResidualNorm::kSum);

/// One synchronous update: every outgoing message is recomputed from the
/// previous snapshot via log-sum-exp, damped against the old message if
/// damping > 0, then gauge fixed. Returns the new messages and the quotient
/// distance from the old ones.
std::pair<LogMessages, double> update_parallel(
    const FactorGraph& g, const LogMessages& messages, double damping = 0.0,
    ResidualNorm norm = ResidualNorm::kSum);

/// Beliefs from a message state: b_i from the product of incoming factor
/// messages, b_I from the factor table times the variable->factor products.
/// Each table is normalized to sum 1.
Marginals compute_beliefs(const FactorGraph& g, const LogMessages& messages);

/// Iterates update_parallel until the residual drops to opts.tol or
/// max_iters is reached. Non-convergence is reported in the result, not an
/// error. Deterministic for identical (graph, options, seed).
LbpResult run_lbp(const FactorGraph& g, const LbpOptions& opts = {});

}  // namespace lbpcert
