"""Special functions and singular quadrature used throughout the package.

Everything here is a pure function: the slope substitution G and its
inverse, the normalisation constants c0 and c_star, Gauss-Legendre
quadrature for integrands with an inverse-square-root endpoint
singularity, the Gauss hypergeometric series, and Jacobi elliptic
functions at modulus 1/sqrt(2).
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.special import roots_legendre

__all__ = [
    "QuadSpec",
    "EllipticTriple",
    "DomainError",
    "ConvergenceError",
    "default_nodes",
    "fixed_gauss",
    "adaptive_gauss",
    "sqrt_singular_integral",
    "g_of",
    "g_inv",
    "c0",
    "c0_quadrature",
    "c_star",
    "gauss_2f1",
    "moment_integral",
    "jacobi_cn_sn_dn",
    "elliptic_K_half",
]


class DomainError(ValueError):
    """Argument outside the mathematical domain of an operation."""


class ConvergenceError(RuntimeError):
    """An iterative evaluation failed to reach the requested tolerance."""


def default_nodes() -> int:
    """Base Gauss-Legendre order; overridable via ELASTICA_QUAD_NODES."""
    return int(os.environ.get("ELASTICA_QUAD_NODES", "128"))


@dataclass(frozen=True)
class QuadSpec:
    """Quadrature request: base node count and relative tolerance."""

    nodes: int = 128
    tol: float = 1e-11

    def __post_init__(self) -> None:
        if self.nodes < 2:
            raise DomainError(f"nodes must be >= 2, got {self.nodes}")
        if not self.tol > 0:
            raise DomainError(f"tol must be > 0, got {self.tol}")


@dataclass(frozen=True)
class EllipticTriple:
    """Jacobi cn, sn, dn evaluated at a common argument, modulus 1/sqrt(2)."""

    cn: float
    sn: float
    dn: float


_node_cache: dict[int, tuple[np.ndarray, np.ndarray]] = {}


def _nodes01(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre nodes and weights mapped to [0, 1]."""
    try:
        return _node_cache[n]
    except KeyError:
        x, w = roots_legendre(n)
        pair = (0.5 * (x + 1.0), 0.5 * w)
        _node_cache[n] = pair
        return pair


def fixed_gauss(f: Callable[[np.ndarray], np.ndarray], a: float, b: float, n: int) -> float:
    """Fixed-order Gauss-Legendre value of the integral of f over [a, b]."""
    s, w = _nodes01(n)
    t = a + (b - a) * s
    return (b - a) * float(np.sum(w * f(t)))


_MAX_NODES = 1024
_MAX_DEPTH = 48


def adaptive_gauss(
    f: Callable[[np.ndarray], np.ndarray],
    a: float,
    b: float,
    q: QuadSpec | None = None,
    _depth: int = 0,
) -> float:
    """Adaptive Gauss-Legendre: node doubling, then interval bisection.

    Successive node counts are doubled until two levels agree to q.tol;
    if agreement is not reached by a moderate order (where computing the
    node table itself becomes expensive) the interval is bisected and
    both halves are refined recursively, which resolves sharp interior
    or endpoint peaks in logarithmically many levels.
    """
    q = q or QuadSpec(nodes=default_nodes())
    n = max(q.nodes, 8)
    prev = fixed_gauss(f, a, b, n)
    while n < _MAX_NODES:
        n *= 2
        val = fixed_gauss(f, a, b, n)
        if abs(val - prev) <= q.tol * (abs(val) + 1e-300):
            return val
        prev = val
    if _depth >= _MAX_DEPTH:
        raise ConvergenceError(
            f"quadrature did not settle to tol={q.tol} on [{a}, {b}]"
        )
    mid = 0.5 * (a + b)
    return adaptive_gauss(f, a, mid, q, _depth + 1) + adaptive_gauss(
        f, mid, b, q, _depth + 1
    )


def sqrt_singular_integral(
    f: Callable[[np.ndarray], np.ndarray],
    alpha: float,
    q: QuadSpec | None = None,
) -> float:
    """Integral of f(t)/sqrt(alpha - t) over [0, alpha].

    The substitution t = alpha*(1 - s^2) removes the endpoint singularity
    exactly, leaving 2*sqrt(alpha) * int_0^1 f(alpha*(1-s^2)) ds which is
    evaluated by node-doubling Gauss-Legendre.
    """
    if not alpha > 0:
        raise DomainError(f"alpha must be > 0, got {alpha}")
    val = adaptive_gauss(lambda s: f(alpha * (1.0 - s * s)), 0.0, 1.0, q)
    return 2.0 * math.sqrt(alpha) * val


# --- the slope substitution G and its inverse -------------------------------

_SQRT_HALF_PI = math.sqrt(0.5 * math.pi)


def _arc_integrand(p: np.ndarray) -> np.ndarray:
    # After t = tan(theta) and theta = pi/2 - p^2 the integrand of G
    # becomes 2 p sqrt(sin(p^2)), analytic on [0, sqrt(pi/2)].
    return 2.0 * p * np.sqrt(np.sin(p * p))


def g_of(x: float, q: QuadSpec | None = None) -> float:
    """G(x) = int_0^x (1 + t^2)^(-5/4) dt, odd and strictly increasing."""
    if x == 0.0:
        return 0.0
    sign = 1.0 if x > 0 else -1.0
    ax = abs(x)
    # arctan(1/ax) = pi/2 - arctan(ax) without cancellation
    lo = math.sqrt(math.atan2(1.0, ax))
    return sign * adaptive_gauss(_arc_integrand, lo, _SQRT_HALF_PI, q)


def c0_quadrature(q: QuadSpec | None = None) -> float:
    """c0 = int_R (1 + t^2)^(-5/4) dt, by quadrature."""
    return 2.0 * adaptive_gauss(_arc_integrand, 0.0, _SQRT_HALF_PI, q)


def c0() -> float:
    """c0 via the Gamma-function closed form sqrt(pi)*Gamma(3/4)/Gamma(5/4)."""
    return math.sqrt(math.pi) * math.gamma(0.75) / math.gamma(1.25)


def c_star() -> float:
    """Sharp obstacle-height threshold 2/c0."""
    return 2.0 / c0()


def g_inv(y: float, tol: float = 1e-14) -> float:
    """Inverse of g_of on (-c0/2, c0/2), by safeguarded Newton.

    The Newton update uses (G^-1)'(y) = (1 + G^-1(y)^2)^(5/4); bisection
    on a grown bracket guards every step, so monotonicity of G makes the
    iteration unconditionally convergent.
    """
    half_c0 = 0.5 * c0()
    if not abs(y) < half_c0:
        raise DomainError(f"|y| must be < c0/2 = {half_c0}, got {y}")
    if y == 0.0:
        return 0.0
    sign = 1.0 if y > 0 else -1.0
    ay = abs(y)
    lo, hi = 0.0, 1.0
    while g_of(hi) < ay:
        hi *= 4.0
        if hi > 1e18:  # unreachable for |y| < c0/2, defensive only
            raise ConvergenceError("bracket growth failed in g_inv")
    x = 0.5 * (lo + hi)
    for _ in range(200):
        r = g_of(x) - ay
        if r > 0.0:
            hi = x
        else:
            lo = x
        step = -r * (1.0 + x * x) ** 1.25
        xn = x + step
        if not (lo <= xn <= hi):
            xn = 0.5 * (lo + hi)
        if abs(xn - x) <= tol * (1.0 + abs(x)):
            x = xn
            break
        x = xn
    return sign * x


# --- Gauss hypergeometric function ------------------------------------------

_SERIES_CAP = 200_000
_SERIES_SWITCH = 0.95


def _hyp_series(a: float, b: float, c: float, x: float, tol: float) -> float:
    """Direct series for 0 <= x < 1 by term recurrence."""
    term = 1.0
    total = 1.0
    for k in range(_SERIES_CAP):
        term *= (a + k) * (b + k) / ((c + k) * (k + 1.0)) * x
        total += term
        if abs(term) <= tol * abs(total):
            return total
    raise ConvergenceError(
        f"2F1 series did not converge at x={x} within {_SERIES_CAP} terms"
    )


def _hyp_integral(a: float, b: float, c: float, x: float) -> float:
    """Euler-integral evaluation, used for x close to 1.

    2F1[a,b;c;x] = B(b, c-b)^-1 int_0^1 t^(b-1) (1-t)^(c-b-1) (1-x t)^(-a) dt.
    Valid for c > b > 0; the endpoint singularities are absorbed by the
    quartic substitutions t = w^4 and 1 - t = v^4, which need b >= 1/4
    and c - b >= 1/4.
    """
    if not (c > b > 0):
        raise DomainError("integral fallback requires c > b > 0")
    if b < 0.25 or c - b < 0.25:
        raise DomainError("integral fallback requires b >= 1/4 and c - b >= 1/4")

    def left(w: np.ndarray) -> np.ndarray:
        t = w ** 4
        return 4.0 * w ** (4.0 * b - 1.0) * (1.0 - t) ** (c - b - 1.0) * (1.0 - x * t) ** (-a)

    def right(v: np.ndarray) -> np.ndarray:
        t = 1.0 - v ** 4
        return 4.0 * v ** (4.0 * (c - b) - 1.0) * t ** (b - 1.0) * (1.0 - x * t) ** (-a)

    split = 0.5 ** 0.25
    val = adaptive_gauss(left, 0.0, split) + adaptive_gauss(right, 0.0, split)
    beta = math.gamma(b) * math.gamma(c - b) / math.gamma(c)
    return val / beta


def gauss_2f1(a: float, b: float, c: float, x: float, tol: float = 1e-14) -> float:
    """2F1[a, b; c; x] for real parameters and x < 1.

    The series is summed directly on [0, 0.95]; negative arguments are
    mapped into (0, 1) by Pfaff's transformation
    2F1[a,b;c;x] = (1-x)^(-a) 2F1[a, c-b; c; x/(x-1)]; arguments in
    (0.95, 1) fall back to quadrature of the Euler integral.
    """
    if c <= 0 and c == int(c):
        raise DomainError(f"c must not be a nonpositive integer, got {c}")
    if x >= 1.0:
        raise ConvergenceError(f"2F1 argument must satisfy x < 1, got {x}")
    if x < 0.0:
        return (1.0 - x) ** (-a) * gauss_2f1(a, c - b, c, x / (x - 1.0), tol)
    if x <= _SERIES_SWITCH:
        return _hyp_series(a, b, c, x, tol)
    return _hyp_integral(a, b, c, x)


def moment_integral(m: int) -> float:
    """int_0^1 t^m (1-t)^(-1/2) dt = 2 * prod_{l=1..m} 2l/(2l+1)."""
    if m < 0:
        raise DomainError(f"m must be >= 0, got {m}")
    val = 2.0
    for l in range(1, m + 1):
        val *= 2.0 * l / (2.0 * l + 1.0)
    return val


# --- Jacobi elliptic functions at modulus 1/sqrt(2) -------------------------

_K_MODULUS_SQ = 0.5  # m = k^2


def _agm_scheme() -> tuple[list[float], list[float]]:
    """Descending Landen coefficients (a_n, c_n) for modulus 1/sqrt(2)."""
    a, b = 1.0, math.sqrt(1.0 - _K_MODULUS_SQ)
    aa, cc = [a], [math.sqrt(_K_MODULUS_SQ)]
    for _ in range(12):
        c_next = 0.5 * (a - b)
        a, b = 0.5 * (a + b), math.sqrt(a * b)
        aa.append(a)
        cc.append(c_next)
        if abs(c_next) < 1e-17:
            break
    return aa, cc


_AA, _CC = _agm_scheme()


def elliptic_K_half() -> float:
    """Complete elliptic integral K(1/sqrt(2)) via the AGM."""
    return math.pi / (2.0 * _AA[-1])


def jacobi_cn_sn_dn(u: float) -> EllipticTriple:
    """cn, sn, dn at modulus 1/sqrt(2) by the descending Landen transform."""
    n = len(_AA) - 1
    phi = float(2 ** n) * _AA[n] * u
    for i in range(n, 0, -1):
        arg = (_CC[i] / _AA[i]) * math.sin(phi)
        phi = 0.5 * (phi + math.asin(max(-1.0, min(1.0, arg))))
    sn = math.sin(phi)
    cn = math.cos(phi)
    # dn through the modulus relation: the quotient form cn/cos(phi1-phi0)
    # is 0/0-ill-conditioned at odd multiples of K, while dn is bounded
    # below by 1/sqrt(2) here, so the square root loses nothing
    dn = math.sqrt(1.0 - 0.5 * sn * sn)
    return EllipticTriple(cn=cn, sn=sn, dn=dn)
