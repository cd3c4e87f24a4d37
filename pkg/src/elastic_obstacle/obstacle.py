"""Obstacle-problem front end: classification, minimization, optimality checks.

A symmetric cone obstacle is negative at the endpoints, peaks at the
midpoint, and is linear on each half.  Solvability of the constrained
bending-energy minimization depends only on the peak value: a unique
minimizer exists exactly when psi(1/2) < c*, and it touches the obstacle
at the midpoint alone, where it is produced here by the shooting module.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.integrate import simpson

from .specfun import DomainError, c_star
from .shooting import NoSolutionError, ShotProfile, reconstruct_profile, solve_alpha

__all__ = [
    "ObstacleSC",
    "Classification",
    "classify",
    "minimize",
    "energy",
    "first_variation",
    "residual_EL",
]


@dataclass(frozen=True)
class ObstacleSC:
    """Symmetric cone obstacle, determined by its endpoint and peak values."""

    psi0: float
    psiHalf: float

    def __post_init__(self) -> None:
        if not self.psi0 < 0:
            raise DomainError(f"psi(0) must be < 0, got {self.psi0}")
        if not self.psiHalf > 0:
            raise DomainError(f"psi(1/2) must be > 0, got {self.psiHalf}")

    def psi(self, x: np.ndarray | float) -> np.ndarray | float:
        """Evaluate the cone: linear interpolation to the peak, reflected."""
        x = np.asarray(x, dtype=float)
        xr = np.minimum(x, 1.0 - x)
        return (1.0 - 2.0 * xr) * self.psi0 + 2.0 * xr * self.psiHalf


@dataclass(frozen=True)
class Classification:
    """Outcome of the height-threshold test."""

    solvable: bool
    threshold: float
    margin: float


def classify(obs: ObstacleSC) -> Classification:
    """Solvable exactly when the obstacle peak lies below the threshold c*."""
    thr = c_star()
    return Classification(
        solvable=obs.psiHalf < thr, threshold=thr, margin=thr - obs.psiHalf
    )


def minimize(obs: ObstacleSC, n: int) -> ShotProfile:
    """The unique constrained minimizer, via the shooting parametrization."""
    if not classify(obs).solvable:
        raise NoSolutionError(
            f"obstacle peak {obs.psiHalf} is at or above c* = {c_star()}"
        )
    return reconstruct_profile(solve_alpha(obs.psiHalf), n)


def _check_grids(*arrays: np.ndarray) -> None:
    sizes = {len(a) for a in arrays}
    if len(sizes) != 1:
        raise DomainError(f"grid length mismatch: {sorted(sizes)}")


def energy(u: np.ndarray, du: np.ndarray, d2u: np.ndarray, xs: np.ndarray) -> float:
    """Composite-Simpson bending energy int (u'')^2 (1 + u'^2)^(-5/2) dx."""
    _check_grids(u, du, d2u, xs)
    integrand = d2u * d2u * (1.0 + du * du) ** -2.5
    return float(simpson(integrand, x=xs))


def _fd_derivatives(u: np.ndarray, xs: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Central first and second differences, one-sided copies at the ends."""
    h = xs[1] - xs[0]
    du = np.empty_like(u)
    d2u = np.empty_like(u)
    du[1:-1] = (u[2:] - u[:-2]) / (2.0 * h)
    d2u[1:-1] = (u[2:] - 2.0 * u[1:-1] + u[:-2]) / (h * h)
    du[0] = (u[1] - u[0]) / h
    du[-1] = (u[-1] - u[-2]) / h
    d2u[0] = d2u[1]
    d2u[-1] = d2u[-2]
    return du, d2u


def first_variation(u: np.ndarray, v: np.ndarray, xs: np.ndarray) -> float:
    """First variation of the energy at u in the direction phi = v - u.

    Quadrature of 2 u'' phi''/(1+u'^2)^(5/2) - 5 (u'')^2 u' phi'/(1+u'^2)^(7/2)
    with all derivatives taken by central differences on the shared grid.
    """
    _check_grids(u, v, xs)
    if abs(v[0]) > 1e-12 or abs(v[-1]) > 1e-12:
        raise DomainError("direction must vanish at the boundary")
    du, d2u = _fd_derivatives(u, xs)
    phi = v - u
    dphi, d2phi = _fd_derivatives(phi, xs)
    q = 1.0 + du * du
    integrand = 2.0 * d2u * d2phi / q ** 2.5 - 5.0 * d2u * d2u * du * dphi / q ** 3.5
    return float(simpson(integrand, x=xs))


def residual_EL(profile: ShotProfile) -> float:
    """Sup-norm defect of the conserved first integral on the open left half.

    The solution satisfies 2u'''/(1+u'^2)^(5/2) - 5(u'')^2 u'/(1+u'^2)^(7/2)
    = 2 beta*/(1+alpha^2)^(5/2) on (0, 1/2); u''' is estimated by central
    differences of the sampled u'' strictly left of the midpoint so the
    derivative jump at 1/2 is never straddled.
    """
    xs, du, d2u = profile.xs, profile.du, profile.d2u
    h = xs[1] - xs[0]
    m = (len(xs) - 1) // 2
    # interior of (0, 1/2): central d3u needs neighbours on the same side
    idx = np.arange(2, m - 1)
    if len(idx) == 0:
        raise DomainError("grid too coarse for the residual stencil")
    d3u = (d2u[idx + 1] - d2u[idx - 1]) / (2.0 * h)
    q = 1.0 + du[idx] * du[idx]
    lhs = 2.0 * d3u / q ** 2.5 - 5.0 * d2u[idx] ** 2 * du[idx] / q ** 3.5
    rhs = 2.0 * profile.beta_star / (1.0 + profile.alpha ** 2) ** 2.5
    return float(np.max(np.abs(lhs - rhs)))
