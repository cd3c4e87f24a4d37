"""Limit curves: the singular arc, elliptic curvatures, and reconstruction.

The curvature of every profile, written in arclength, solves
kappa'' + kappa^3/2 = 0 and is therefore an elliptic cn at modulus
1/sqrt(2).  This module samples the singular limit arc gamma_U, the
finite-alpha curvature k_alpha, the planar reconstruction gamma_alpha
obtained by integrating the tangent angle, and the uniform gap between
the rescaled gamma_alpha and gamma_U.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import cumulative_simpson
from scipy.optimize import brentq

from .shooting import arclength_half, integral_I
from .specfun import (
    DomainError,
    QuadSpec,
    adaptive_gauss,
    c0,
    elliptic_K_half,
    jacobi_cn_sn_dn,
)

__all__ = [
    "PlanarCurve",
    "arclength_LU",
    "singular_curve",
    "kappa_U",
    "k_alpha",
    "reconstruct_gamma_alpha",
    "convergence_gap",
]


@dataclass(frozen=True)
class PlanarCurve:
    """Arclength-sampled planar curve with tangent angles and curvature."""

    ss: np.ndarray
    pts: np.ndarray
    theta: np.ndarray
    kappa: np.ndarray
    length: float


def _slope_tail(t: float, q: QuadSpec | None = None) -> float:
    """int_t^infty (1 + tau^2)^(-3/4) d tau, singularity-free form.

    tau = tan(theta) then theta = pi/2 - phi^2 turns the integrand into
    2 phi (sin phi^2)^(-1/2), which is analytic on the truncated range.
    """
    hi = math.sqrt(math.atan2(1.0, t)) if t > 0 else math.sqrt(0.5 * math.pi)

    def f(p: np.ndarray) -> np.ndarray:
        return 2.0 * p / np.sqrt(np.sin(p * p))

    return adaptive_gauss(f, 0.0, hi, q)


def arclength_LU() -> float:
    """Total arclength L_U of the singular limit arc."""
    return _slope_tail(0.0) / c0()


def _slope_from_arclength(s: float, L: float) -> float:
    """Invert s = (1/c0) int_t^infty (1+tau^2)^(-3/4) d tau for t >= 0."""
    target = c0() * s
    hi = 1.0
    while _slope_tail(hi) > target:
        hi *= 4.0
        if hi > 1e30:
            raise DomainError(f"arclength {s} too close to the endpoint")
    return brentq(lambda t: _slope_tail(t) - target, 0.0, hi, xtol=1e-13)


def singular_curve(n: int) -> PlanarCurve:
    """The singular arc gamma_U on a uniform arclength grid of n samples.

    Parametrized by the graph slope t: x = (c0/2 - G(t))/c0 and
    y = 2/(c0 (1+t^2)^(1/4)); the endpoint s = 0 is the origin with a
    vertical tangent, resolved analytically rather than sampled.
    """
    if n < 3:
        raise DomainError(f"need at least 3 samples, got {n}")
    L = arclength_LU()
    ss = np.linspace(0.0, L, n)
    pts = np.zeros((n, 2))
    theta = np.empty(n)
    kappa = np.empty(n)
    theta[0] = 0.5 * math.pi
    kappa[0] = 0.0
    for i in range(1, n):
        t = _slope_from_arclength(ss[i], L)
        pts[i, 0] = _x_of_slope(t)
        pts[i, 1] = 2.0 / (c0() * (1.0 + t * t) ** 0.25)
        theta[i] = math.atan(t)
        kappa[i] = -c0() * (1.0 + t * t) ** -0.25
    return PlanarCurve(ss=ss, pts=pts, theta=theta, kappa=kappa, length=L)


def _x_of_slope(t: float) -> float:
    """Graph abscissa of the singular arc at slope parameter t.

    x = (c0/2 - G(t))/c0, evaluated through the tail of the G-integrand
    to stay accurate for large t.
    """

    def f(p: np.ndarray) -> np.ndarray:
        return 2.0 * p * np.sqrt(np.sin(p * p))

    hi = math.sqrt(math.atan2(1.0, t)) if t > 0 else math.sqrt(0.5 * math.pi)
    return adaptive_gauss(f, 0.0, hi) / c0()


def kappa_U(s: float) -> float:
    """Curvature of the singular arc: c0 cn(c0 s / sqrt(2) + K)."""
    L = arclength_LU()
    if not -1e-12 <= s <= L + 1e-12:
        raise DomainError(f"arclength {s} outside [0, {L}]")
    arg = c0() * s / math.sqrt(2.0) + elliptic_K_half()
    return c0() * jacobi_cn_sn_dn(arg).cn


def k_alpha(tau: float, alpha: float) -> float:
    """Curvature of gamma_alpha at arclength tau."""
    if not alpha > 0:
        raise DomainError(f"alpha must be > 0, got {alpha}")
    L = arclength_half(alpha)
    if not -1e-12 <= tau <= L + 1e-9:
        raise DomainError(f"arclength {tau} outside [0, {L}]")
    I = integral_I(alpha)
    root = (1.0 + alpha * alpha) ** 0.25
    amp = 2.0 * I * root / math.sqrt(alpha)
    rate = math.sqrt(2.0) * I * root / math.sqrt(alpha)
    return amp * jacobi_cn_sn_dn(rate * tau + elliptic_K_half()).cn


def reconstruct_gamma_alpha(
    alpha: float, n: int, taus: np.ndarray | None = None
) -> PlanarCurve:
    """Integrate the tangent angle of k_alpha into a planar curve.

    theta(tau) accumulates by Simpson, the points by a second cumulative
    Simpson pass, and the initial tangent (1, alpha)/sqrt(1+alpha^2) is
    applied as the rotation Q_alpha of the whole construction.
    """
    if not alpha > 0:
        raise DomainError(f"alpha must be > 0, got {alpha}")
    if n < 3:
        raise DomainError(f"need at least 3 samples, got {n}")
    L = arclength_half(alpha)
    if taus is None:
        taus = np.linspace(0.0, L, n)
    kap = np.array([k_alpha(t, alpha) for t in taus])
    theta = cumulative_simpson(kap, x=taus, initial=0.0)
    cx = cumulative_simpson(np.cos(theta), x=taus, initial=0.0)
    cy = cumulative_simpson(np.sin(theta), x=taus, initial=0.0)
    root = math.sqrt(1.0 + alpha * alpha)
    q = np.array([[1.0, -alpha], [alpha, 1.0]]) / root
    pts = np.stack([cx, cy], axis=1) @ q.T
    return PlanarCurve(
        ss=np.asarray(taus),
        pts=pts,
        theta=theta + math.atan(alpha),
        kappa=kap,
        length=L,
    )


def convergence_gap(alpha: float, n: int) -> float:
    """sup_s |gamma_alpha((L_alpha/L_U) s) - gamma_U(s)| over an s-grid."""
    if not alpha > 0:
        raise DomainError(f"alpha must be > 0, got {alpha}")
    gu = singular_curve(n)
    ratio = arclength_half(alpha) / gu.length
    ga = reconstruct_gamma_alpha(alpha, n, taus=ratio * gu.ss)
    return float(np.max(np.linalg.norm(ga.pts - gu.pts, axis=1)))
