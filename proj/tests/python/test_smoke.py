"""Smoke tests for the python module; runnable directly or under pytest."""

import math

import lbpcert


def test_parse_and_roundtrip():
    text = "1\n2\n0 1\n2 2\n4\n0 2.0 1 0.5 2 0.5 3 2.0\n"
    g = lbpcert.parse_factor_graph(text)
    assert g.num_vars == 2
    assert g.num_factors == 1
    assert g.factor_vars(0) == [0, 1]
    again = lbpcert.parse_factor_graph(lbpcert.serialize_factor_graph(g))
    assert again == g


def test_tree_beliefs_match_oracle():
    g = lbpcert.generate_grid(2, 3, periodic=False, j0=0.8, sigma=0.3, seed=4)
    assert not lbpcert.is_tree(g)
    result = lbpcert.run_lbp(g, tol=1e-12)
    assert result["converged"]
    exact_var, exact_factor = lbpcert.brute_force_marginals(g)
    for approx, exact in zip(result["var_beliefs"], exact_var):
        for a, b in zip(approx, exact):
            assert abs(a - b) < 0.05  # loopy graph: approximate only
    chain = lbpcert.make_graph(
        3,
        [2, 2, 2],
        [([0, 1], [2.0, 0.5, 0.5, 2.0]), ([1, 2], [2.0, 0.5, 0.5, 2.0])],
    )
    assert lbpcert.is_tree(chain)
    result = lbpcert.run_lbp(chain, tol=1e-12)
    exact_var, exact_factor = lbpcert.brute_force_marginals(chain)
    for approx, exact in zip(result["var_beliefs"], exact_var):
        for a, b in zip(approx, exact):
            assert abs(a - b) < 1e-10


def test_certificates_and_spectral():
    torus = lbpcert.generate_grid(4, 4, periodic=True, j0=0.3, seed=0)
    report = lbpcert.spectral_condition(torus)
    assert report["pass"]
    assert abs(report["value"] - 3.0 * math.tanh(0.3)) < 1e-6
    l1 = lbpcert.l1_condition(torus)
    ihler = lbpcert.ihler_condition(torus)
    assert report["value"] <= l1["value"] + 1e-6
    assert l1["value"] <= ihler["value"] + 1e-6

    hot = lbpcert.generate_grid(4, 4, periodic=True, j0=0.4, seed=0)
    assert not lbpcert.spectral_condition(hot)["pass"]

    i, j = torus.factor_vars(0)
    assert abs(lbpcert.strength_n(torus, 0, i, j) - math.tanh(0.3)) < 1e-12
    assert abs(lbpcert.strength_d_pairwise(torus, 0) - math.tanh(0.3)) < 1e-12


def test_bound_matrix_shape():
    torus = lbpcert.generate_grid(4, 4, periodic=True, j0=0.3, seed=0)
    dim, entries = lbpcert.bound_matrix(torus)
    assert dim == len(lbpcert.directed_edges(torus))
    est = lbpcert.spectral_radius(dim, entries)
    assert est["converged"]
    assert abs(est["rho"] - 3.0 * math.tanh(0.3)) < 1e-6


if __name__ == "__main__":
    test_parse_and_roundtrip()
    test_tree_beliefs_match_oracle()
    test_certificates_and_spectral()
    test_bound_matrix_shape()
    print("python smoke tests passed")
