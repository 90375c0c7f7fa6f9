"""Stochastic control under volatility uncertainty.

Thin Python layer over the C++ core: the G-function, the monotone HJB
solver, the theta-lattice Monte-Carlo bound, the tree G-BSDE solver and the
experiment runner behind the ``gctl`` command.
"""

from ._core import (
    Config,
    GammaSet,
    catalog_ids,
    dpp_residual,
    g_eval,
    g_maximizer,
    load_config,
    mc_sublinear_expectation,
    oracle_compare,
    run,
    solve_g_heat,
    solve_hjb,
    subcommands,
    tree_solve,
)

__all__ = [
    "Config",
    "GammaSet",
    "catalog_ids",
    "dpp_residual",
    "g_eval",
    "g_maximizer",
    "load_config",
    "mc_sublinear_expectation",
    "oracle_compare",
    "run",
    "solve_g_heat",
    "solve_hjb",
    "subcommands",
    "tree_solve",
]
