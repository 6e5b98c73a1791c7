#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "lbpcert/factor_graph.hpp"
#include "lbpcert/lbp.hpp"

namespace lbpcert {

/// Random 2D nearest-neighbour grid of binary spins: couplings drawn
/// i.i.d. Normal(j0, sigma^2), optional uniform local field theta.
struct GridSpec {
  int rows = 10;
  int cols = 10;
  bool periodic = true;
  double j0 = 0.0;
  double sigma = 0.0;
  double theta = 0.0;
  std::uint64_t seed = 0;
};

/// Builds the grid graph. Variables are row-major (id = r*cols + c). Edges
/// are generated in row-major vertex order, right edge then down edge
/// (wrapping around iff periodic), one normal() draw per edge in that
/// order; pair tables are exp(+-J), single-variable tables exp(+-theta)
/// appended after all pair factors (only when theta != 0). Same spec, same
/// graph, bit for bit. Throws std::invalid_argument if rows or cols < 2 or
/// sigma < 0.
FactorGraph generate_grid(const GridSpec& spec);

struct ConvergenceStats {
  double fraction = 0.0;          // trials that converged / trials
  double mean_iterations = 0.0;   // over converged trials, 0 if none
  double max_final_residual = 0.0;
};

/// Runs `trials` LBP runs from random initializations seeded
/// opts.seed + 0 .. opts.seed + trials-1 (opts.init is forced to kRandom).
ConvergenceStats empirical_convergence(const FactorGraph& g, int trials,
                                       const LbpOptions& opts);

/// One certificate-versus-empirical record for one grid instance.
struct SweepRow {
  int instance = 0;
  std::uint64_t seed = 0;
  double j0 = 0.0;
  double sigma = 0.0;
  double l1_value = 0.0;
  double rho = 0.0;
  double ihler_value = 0.0;
  bool l1_pass = false;
  bool spectral_pass = false;
  bool ihler_pass = false;
  bool empirical_converged = false;  // every trial converged
  double iterations = 0.0;           // mean over converged trials
  double final_residual = 0.0;       // worst over trials
};

/// For each spec and instance 0..instances_per_point-1: generates the grid
/// with seed spec.seed + instance, evaluates the l1, spectral and
/// dynamic-range certificates, measures empirical convergence over
/// `trials` random initializations (trial t seeded instance seed + t), and
/// emits one row. Output order: spec order, then instance index.
std::vector<SweepRow> run_sweep(std::span<const GridSpec> specs,
                                int instances_per_point, int trials,
                                const LbpOptions& opts);

/// CSV with header
/// instance,seed,j0,sigma,l1_value,rho,ihler_value,l1_pass,spectral_pass,
/// ihler_pass,empirical_converged,iterations,final_residual
/// floats in shortest round-trip decimals, booleans as true/false.
void emit_csv(std::span<const SweepRow> rows, std::ostream& out);

/// Standalone SVG phase diagram over the (j0, sigma) lattice covered by the
/// rows: per series (l1 / spectral / dynamic-range / empirical) the
/// boundary where the mean certificate value crosses 1 (or the convergence
/// fraction crosses 1/2). For lattices with a single sigma the boundary is
/// located along j0 instead. Axis labels follow the J0/J vs J convention.
/// Throws std::invalid_argument if the rows do not cover a full lattice.
void emit_phase_plot(std::span<const SweepRow> rows, std::ostream& out);

}  // namespace lbpcert
