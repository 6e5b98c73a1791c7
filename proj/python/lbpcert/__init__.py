"""Loopy belief propagation on factor graphs with convergence certificates."""

from ._lbpcert import (
    FactorGraph,
    bound_matrix,
    brute_force_marginals,
    directed_edges,
    generate_grid,
    ihler_condition,
    is_tree,
    l1_condition,
    make_graph,
    parse_factor_graph,
    run_lbp,
    serialize_factor_graph,
    spectral_condition,
    spectral_radius,
    strength_d_pairwise,
    strength_n,
    __version__,
)

__all__ = [
    "FactorGraph",
    "bound_matrix",
    "brute_force_marginals",
    "directed_edges",
    "generate_grid",
    "ihler_condition",
    "is_tree",
    "l1_condition",
    "make_graph",
    "parse_factor_graph",
    "run_lbp",
    "serialize_factor_graph",
    "spectral_condition",
    "spectral_radius",
    "strength_d_pairwise",
    "strength_n",
    "__version__",
]
