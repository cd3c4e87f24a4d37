"""Numerics for the symmetric-cone obstacle problem for elastic graphs.

Subpackages: special functions and singular quadrature (specfun), the
shooting apparatus (shooting), the obstacle-problem front end (obstacle),
the constrained gradient flow (flow), elliptic limit curves (curves),
brute-force cross-checks (oracle), and a CLI (cli).
"""

__version__ = "0.1.0"

from .specfun import c0, c_star  # noqa: F401
from .obstacle import ObstacleSC, classify, minimize  # noqa: F401
from .shooting import height, solve_alpha  # noqa: F401

__all__ = [
    "__version__",
    "c0",
    "c_star",
    "ObstacleSC",
    "classify",
    "minimize",
    "height",
    "solve_alpha",
]
