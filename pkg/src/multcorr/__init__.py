"""Correlations of multiplicative functions along systems of linear forms.

Sieve-table evaluation and normalized mean values, lattice-point correlation
sums over convex bodies, exact local densities and main-term predictions,
small-prime (W-trick) scaffolding, pseudorandom majorants, Dirichlet
character machinery, and a configuration-driven experiment CLI.
"""

from ._kernels import BACKEND
from .multfunc import (
    MultiplicativeFunction,
    SieveTable,
    build_sieve,
    get_function,
    mean_value,
    mean_value_progression,
    registered_names,
)

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "MultiplicativeFunction",
    "SieveTable",
    "build_sieve",
    "get_function",
    "mean_value",
    "mean_value_progression",
    "registered_names",
    "__version__",
]
