#pragma once

#include <span>
#include <vector>

#include "lbpcert/certificates.hpp"
#include "lbpcert/edge_matrix.hpp"
#include "lbpcert/factor_graph.hpp"

namespace lbpcert {

struct SpectralEstimate {
  double rho = 0.0;
  int iterations = 0;
  bool converged = false;
  double residual = 0.0;  // last relative change of the estimate
};

/// Exact sparse product, accumulated in entry order.
/// Throws std::invalid_argument on length mismatch.
std::vector<double> matvec(const EdgeMatrix& a, std::span<const double> v);

inline constexpr double kSpectralShift = 1e-3;
inline constexpr double kDefaultSpectralTol = 1e-8;
inline constexpr int kDefaultSpectralIters = 50000;

/// Spectral radius of a nonnegative sparse matrix.
///
/// If the entry digraph is acyclic the matrix is nilpotent and 0 is
/// returned exactly. Otherwise: power iteration on A + eps*I with
/// eps = 1e-3, started from the all-ones vector and l1-renormalized each
/// step; for nonnegative A the shift is exact (rho(A+eps*I) = rho(A)+eps)
/// and the positive diagonal removes periodicity. Converged when
/// successive growth estimates differ by less than tol relatively; the
/// returned rho subtracts the shift and clamps at 0.
/// Throws std::invalid_argument on a negative or non-finite entry.
SpectralEstimate spectral_radius(const EdgeMatrix& a,
                                 double tol = kDefaultSpectralTol,
                                 int max_iters = kDefaultSpectralIters);

/// Spectral certificate: builds bound_matrix(g) and estimates its spectral
/// radius. Passes only when the estimate converged and lies below
/// 1 - 10*tol, so a value within estimation noise of 1 stays inconclusive.
CertificateReport spectral_condition(const FactorGraph& g,
                                     double tol = kDefaultSpectralTol,
                                     int max_iters = kDefaultSpectralIters);

}  // namespace lbpcert
