"""Finite commutative rings over F_p: compressed zero-divisor graphs, clique
numbers, the bilinear form on m/m^2 and a verification harness."""

__version__ = "0.1.0"

from .algebra import FiniteAlgebra, invariants, trivial_extension
from .presentation import compile_presentation
from .zdgraph import build_gamma_e, clique_number

__all__ = [
    "FiniteAlgebra",
    "build_gamma_e",
    "clique_number",
    "compile_presentation",
    "invariants",
    "trivial_extension",
    "__version__",
]
