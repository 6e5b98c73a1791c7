#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "lbpcert/certificates.hpp"
#include "lbpcert/experiments.hpp"
#include "lbpcert/factor_graph.hpp"
#include "lbpcert/spectral.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

using namespace lbpcert;

namespace {

FactorGraph ising_cycle(int n, double coupling) {
  std::vector<Factor> factors;
  for (int v = 0; v < n; ++v)
    factors.push_back(
        {{v, (v + 1) % n}, testutil::ising_pair_table(coupling)});
  return make_graph(n, std::vector<int>(static_cast<std::size_t>(n), 2),
                    std::move(factors));
}

FactorGraph torus(int rows, int cols, double coupling) {
  GridSpec spec;
  spec.rows = rows;
  spec.cols = cols;
  spec.periodic = true;
  spec.j0 = coupling;
  return generate_grid(spec);
}

EdgeMatrix random_sparse(std::mt19937_64& gen, std::size_t dim,
                         double density, double scale) {
  EdgeMatrix a;
  a.dim = dim;
  for (std::size_t r = 0; r < dim; ++r)
    for (std::size_t c = 0; c < dim; ++c)
      if (testutil::uniform_in(gen, 0, 1) < density)
        a.entries.push_back({static_cast<int>(r), static_cast<int>(c),
                             scale * testutil::uniform_in(gen, 0, 1)});
  return a;
}

}  // namespace

TEST_CASE("matvec basics") {
  EdgeMatrix zero;
  zero.dim = 3;
  const auto out = matvec(zero, std::vector<double>{1.0, 2.0, 3.0});
  CHECK(out == std::vector<double>{0.0, 0.0, 0.0});

  EdgeMatrix ident;
  ident.dim = 2;
  ident.entries = {{0, 0, 1.0}, {1, 1, 1.0}};
  CHECK(matvec(ident, std::vector<double>{4.0, -2.0}) ==
        std::vector<double>{4.0, -2.0});

  EdgeMatrix swap;
  swap.dim = 2;
  swap.entries = {{0, 1, 2.5}, {1, 0, 0.5}};
  CHECK(matvec(swap, std::vector<double>{1.0, 1.0}) ==
        std::vector<double>{2.5, 0.5});

  CHECK_THROWS_AS(matvec(swap, std::vector<double>{1.0}),
                  std::invalid_argument);
}

TEST_CASE("spectral radius rejects bad input") {
  EdgeMatrix a;
  a.dim = 2;
  a.entries = {{0, 1, -0.5}};
  CHECK_THROWS_AS(spectral_radius(a), std::invalid_argument);
  a.entries = {{0, 3, 0.5}};
  CHECK_THROWS_AS(spectral_radius(a), std::invalid_argument);
  a.entries = {{0, 1, 0.5}};
  CHECK_THROWS_AS(spectral_radius(a, 0.0), std::invalid_argument);
}

TEST_CASE("tree bound matrices have spectral radius exactly zero") {
  std::mt19937_64 gen(101);
  for (int rep = 0; rep < 10; ++rep) {
    const FactorGraph g = testutil::random_tree(
        gen, testutil::uniform_int(gen, 2, 12), 2, 3, 2.0);
    const SpectralEstimate est = spectral_radius(bound_matrix(g));
    CHECK(est.converged);
    CHECK(est.rho == 0.0);
  }
}

TEST_CASE("cycles have spectral radius tanh|J|") {
  for (int n : {3, 5, 10}) {
    for (double coupling : {0.4, 1.0}) {
      const EdgeMatrix a = bound_matrix(ising_cycle(n, coupling));
      const SpectralEstimate est = spectral_radius(a, 1e-10);
      REQUIRE(est.converged);
      CHECK(std::abs(est.rho - std::tanh(coupling)) < 1e-6);
      CHECK(std::abs(est.rho - testoracle::dense_spectral_radius(a)) < 1e-6);
    }
  }
}

TEST_CASE("4-regular torus has spectral radius 3 tanh J") {
  const EdgeMatrix a = bound_matrix(torus(4, 4, 0.3));
  const SpectralEstimate est = spectral_radius(a);
  REQUIRE(est.converged);
  CHECK(std::abs(est.rho - 3.0 * std::tanh(0.3)) < 1e-6);
  CHECK(std::abs(testoracle::dense_spectral_radius(a) -
                 3.0 * std::tanh(0.3)) < 1e-9);
}

TEST_CASE("power iteration agrees with dense eigendecomposition") {
  std::mt19937_64 gen(103);
  for (int rep = 0; rep < 25; ++rep) {
    const auto dim = static_cast<std::size_t>(testutil::uniform_int(gen, 2, 30));
    const EdgeMatrix a =
        random_sparse(gen, dim, 0.25, testutil::uniform_in(gen, 0.1, 2.0));
    const SpectralEstimate est = spectral_radius(a, 1e-10);
    const double dense = testoracle::dense_spectral_radius(a);
    REQUIRE(est.converged);
    CHECK(std::abs(est.rho - dense) < 1e-6);
  }
}

TEST_CASE("estimated radius scales linearly with the entries") {
  std::mt19937_64 gen(107);
  EdgeMatrix a = random_sparse(gen, 12, 0.3, 1.0);
  const double base = spectral_radius(a, 1e-10).rho;
  for (auto& e : a.entries) e.value *= 3.0;
  const double scaled = spectral_radius(a, 1e-10).rho;
  CHECK(std::abs(scaled - 3.0 * base) < 1e-6);
}

TEST_CASE("estimate never exceeds the maximum column sum") {
  std::mt19937_64 gen(109);
  for (int rep = 0; rep < 20; ++rep) {
    const EdgeMatrix a = random_sparse(gen, 15, 0.3, 1.5);
    std::vector<double> col(a.dim, 0.0);
    for (const auto& e : a.entries)
      col[static_cast<std::size_t>(e.col)] += e.value;
    double max_col = 0.0;
    for (double c : col) max_col = std::max(max_col, c);
    CHECK(spectral_radius(a).rho <= max_col + 1e-6);
  }
}

TEST_CASE("spectral certificate") {
  SUBCASE("any tree passes with rho near zero") {
    std::mt19937_64 gen(113);
    const FactorGraph g = testutil::random_tree(gen, 9, 2, 3, 2.5);
    const CertificateReport r = spectral_condition(g);
    CHECK(r.pass);
    CHECK(r.value == 0.0);
  }
  SUBCASE("torus flips between J = 0.3 and J = 0.4") {
    const CertificateReport pass = spectral_condition(torus(4, 4, 0.3));
    CHECK(pass.condition == "spectral-binary");
    CHECK(pass.pass);
    CHECK(std::abs(pass.value - 3.0 * std::tanh(0.3)) < 1e-6);
    const CertificateReport fail = spectral_condition(torus(4, 4, 0.4));
    CHECK_FALSE(fail.pass);
    CHECK(std::abs(fail.value - 3.0 * std::tanh(0.4)) < 1e-6);
  }
  SUBCASE("multiway graphs report the general flavour") {
    const FactorGraph g = make_graph(
        3, {2, 2, 2}, {{{0, 1, 2}, std::vector<double>(8, 1.0)}});
    CHECK(spectral_condition(g).condition == "spectral-general");
  }
}

TEST_CASE("spectral radius is bounded by the l1 value on model graphs") {
  std::mt19937_64 gen(127);
  for (int rep = 0; rep < 20; ++rep) {
    const FactorGraph g = testutil::random_binary_graph(
        gen, testutil::uniform_int(gen, 3, 12),
        testutil::uniform_int(gen, 0, 8), 1.0);
    const double rho = spectral_radius(bound_matrix(g)).rho;
    const double l1 = l1_condition_general(g).value;
    CHECK(rho <= l1 + 1e-6);
  }
}
