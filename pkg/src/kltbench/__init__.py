"""Exact-arithmetic workbench for rank-one log del Pezzo surface computations.

Submodules:

* :mod:`kltbench.dualgraph` -- weighted dual graphs, discrepancies and gaps
* :mod:`kltbench.diophantine` -- K^2 formulas and exhaustive Noether searches
* :mod:`kltbench.lattice` -- Picard-lattice blow-up calculus and contractions
* :mod:`kltbench.planecurve` -- plane curves over Q and F_p, intersection multiplicities
* :mod:`kltbench.cli` -- command line front end
"""

__version__ = "0.1.0"

from kltbench.dualgraph import (
    DualGraph,
    DynkinType,
    coefficient,
    discrepancies,
    discrepancies_with_boundary,
    gap,
    parse_dynkin,
)

__all__ = [
    "DualGraph",
    "DynkinType",
    "coefficient",
    "discrepancies",
    "discrepancies_with_boundary",
    "gap",
    "parse_dynkin",
]
