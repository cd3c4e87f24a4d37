"""Independent brute-force cross-checks used by the tests and `verify`.

Nothing here shares numerics with the modules it validates beyond
elementary arithmetic and the Gauss-Legendre node table: the minimizer
is recomputed by constrained descent on a rectangle-rule discretization,
profiles are re-derived by adaptive Runge-Kutta on the fourth-order
system, and the hypergeometric identity is evaluated from both sides.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp
from scipy.linalg import solveh_banded

from .obstacle import ObstacleSC, classify
from .shooting import NoSolutionError, ShootParams
from .specfun import DomainError, adaptive_gauss, gauss_2f1

__all__ = [
    "DescentConfig",
    "DescentResult",
    "IVPTrajectory",
    "direct_minimize",
    "ivp_integrate",
    "first_slope_zero",
    "series_vs_quadrature",
]


@dataclass(frozen=True)
class DescentConfig:
    """Knobs for the projected-descent oracle."""

    n: int = 401
    max_iters: int = 20_000
    step0: float = 1.0
    shrink: float = 0.5
    grad_tol: float = 2e-6

    def __post_init__(self) -> None:
        if min(self.n, self.max_iters) <= 0 or self.step0 <= 0:
            raise DomainError("descent parameters must be positive")
        if not 0.0 < self.shrink < 1.0:
            raise DomainError(f"shrink must lie in (0,1), got {self.shrink}")


@dataclass(frozen=True)
class DescentResult:
    """Outcome of direct_minimize; u is the full-grid iterate."""

    u: np.ndarray
    energy: float
    grad_norm: float
    iters: int
    converged: bool


def _discrete_energy(ui: np.ndarray, h: float) -> float:
    """Rectangle-rule energy with plain central stencils on interior nodes."""
    u = np.concatenate(([0.0], ui, [0.0]))
    a = (u[2:] - 2.0 * u[1:-1] + u[:-2]) / (h * h)
    du = (u[2:] - u[:-2]) / (2.0 * h)
    return h * float(np.sum(a * a * (1.0 + du * du) ** -2.5))


def _discrete_gradient(ui: np.ndarray, h: float) -> np.ndarray:
    """Exact gradient of _discrete_energy with respect to interior values."""
    n = len(ui)
    u = np.concatenate(([0.0], ui, [0.0]))
    a = (u[2:] - 2.0 * u[1:-1] + u[:-2]) / (h * h)
    du = (u[2:] - u[:-2]) / (2.0 * h)
    q = 1.0 + du * du
    A = 2.0 * a / q ** 2.5
    C = -5.0 * a * a * du / q ** 3.5
    Ae = np.concatenate(([0.0], A, [0.0]))  # u'' = 0 beyond the ends
    Ce = np.concatenate(([0.0], C, [0.0]))
    g = (Ae[2:] - 2.0 * Ae[1:-1] + Ae[:-2]) / (h * h)
    g += (Ce[:-2] - Ce[2:]) / (2.0 * h)
    return h * g


def _bilaplacian_banded(n_int: int, h: float) -> np.ndarray:
    """Upper-form banded Navier bilaplacian used as descent preconditioner."""
    scale = 2.0 * h / h ** 4
    ab = np.zeros((3, n_int))
    ab[0, 2:] = 1.0 * scale
    ab[1, 1:] = -4.0 * scale
    ab[2, :] = 6.0 * scale
    ab[2, 0] = 5.0 * scale  # odd-reflection ghost at each boundary
    ab[2, -1] = 5.0 * scale
    return ab


def _reduced_direction(ab: np.ndarray, g: np.ndarray, active: np.ndarray) -> np.ndarray:
    """Preconditioned direction with binding coordinates frozen.

    Rows and columns of active indices are replaced by identity and their
    right-hand side zeroed, so the solve happens on the inactive set and
    the returned direction never pushes a binding point into the obstacle.
    """
    abm = ab.copy()
    rhs = np.where(active, 0.0, g)
    idx = np.flatnonzero(active)
    m = len(g)
    scale = abm[2].max()
    for j in idx:
        abm[2, j] = scale
        abm[1, j] = 0.0
        if j + 1 < m:
            abm[1, j + 1] = 0.0
        abm[0, j] = 0.0
        if j + 2 < m:
            abm[0, j + 2] = 0.0
    d = solveh_banded(abm, rhs)
    d[idx] = 0.0
    return d


def direct_minimize(
    obs: ObstacleSC, cfg: DescentConfig, u0: np.ndarray | None = None
) -> DescentResult:
    """Constrained minimization of the rectangle-rule energy by descent.

    Projected gradient descent with a banded-bilaplacian change of metric
    (the raw L^2 iteration is hopelessly ill conditioned on fine grids)
    and active-set reduction: coordinates pressed onto the obstacle by a
    positive gradient are frozen, which keeps the search direction
    feasible instead of letting pointwise projection cut curvature kinks
    into the iterate.  Backtracks on the energy, symmetrizes each
    iterate, and stops at the projected-gradient norm.
    """
    if not classify(obs).solvable:
        raise NoSolutionError(f"obstacle peak {obs.psiHalf} not below threshold")
    n = cfg.n
    h = 1.0 / (n - 1)
    xs = np.linspace(0.0, 1.0, n)
    psi_int = np.asarray(obs.psi(xs))[1:-1]
    ab = _bilaplacian_banded(n - 2, h)

    if u0 is None:
        ui = obs.psiHalf * np.sin(np.pi * xs[1:-1])
    else:
        if len(u0) != n:
            raise DomainError(f"initial guess length {len(u0)} != n = {n}")
        ui = np.asarray(u0, dtype=float)[1:-1]
    ui = np.maximum(ui, psi_int)
    ui = 0.5 * (ui + ui[::-1])
    e = _discrete_energy(ui, h)
    g = _discrete_gradient(ui, h)
    grad_norm = math.inf
    iters = 0
    for iters in range(1, cfg.max_iters + 1):
        binding = ui - psi_int <= 1e-12
        active = binding & (g > 0.0)
        pg = np.where(binding, np.minimum(g, 0.0), g)
        grad_norm = float(np.max(np.abs(pg)))
        if grad_norm <= cfg.grad_tol:
            break
        d = _reduced_direction(ab, g, active)
        sigma = cfg.step0
        while True:
            trial = np.maximum(ui - sigma * d, psi_int)
            trial = 0.5 * (trial + trial[::-1])
            e_trial = _discrete_energy(trial, h)
            if e_trial <= e or sigma < 1e-14:
                break
            sigma *= cfg.shrink
        if np.array_equal(trial, ui):
            break
        ui, e = trial, e_trial
        g = _discrete_gradient(ui, h)
    u = np.concatenate(([0.0], ui, [0.0]))
    return DescentResult(
        u=u,
        energy=e,
        grad_norm=grad_norm,
        iters=iters,
        converged=grad_norm <= cfg.grad_tol,
    )


# --- adaptive Runge-Kutta re-integration ------------------------------------


@dataclass(frozen=True)
class IVPTrajectory:
    """Dense samples of (u, u', u'', u''') plus where integration stopped."""

    xs: np.ndarray
    u: np.ndarray
    du: np.ndarray
    d2u: np.ndarray
    d3u: np.ndarray
    x_reached: float
    blew_up: bool


_BLOWUP = 1e7


def _rhs(x: float, y: np.ndarray) -> np.ndarray:
    u, du, d2u, d3u = y
    q = 1.0 + du * du
    d4u = (5.0 * d2u / (2.0 * q)) * (4.0 * d3u * du + d2u * d2u) - (
        17.5 * d2u ** 3 * du * du / (q * q)
    )
    return np.array([du, d2u, d3u, d4u])


def _blowup_event(x: float, y: np.ndarray) -> float:
    return _BLOWUP - abs(y[1])


_blowup_event.terminal = True


def ivp_integrate(
    params: ShootParams, x_end: float, steps: int = 1001, rtol: float = 1e-10
) -> IVPTrajectory:
    """Integrate the fourth-order system from midline data by DOP853.

    The quasilinear equation develops a slope singularity on some shots;
    integration then stops at the blow-up event and the trajectory is
    truncated there with blew_up set.
    """
    if x_end <= 0:
        raise DomainError(f"x_end must be > 0, got {x_end}")
    y0 = np.array([0.0, params.alpha, 0.0, params.beta])
    sol = solve_ivp(
        _rhs,
        (0.0, x_end),
        y0,
        method="DOP853",
        rtol=rtol,
        atol=1e-12,
        dense_output=True,
        events=[_blowup_event],
    )
    blew_up = sol.status == 1 or not sol.success
    x_reached = float(sol.t[-1])
    xs = np.linspace(0.0, x_reached, steps)
    ys = sol.sol(xs)
    return IVPTrajectory(
        xs=xs,
        u=ys[0],
        du=ys[1],
        d2u=ys[2],
        d3u=ys[3],
        x_reached=x_reached,
        blew_up=blew_up,
    )


def first_slope_zero(params: ShootParams, x_max: float = 10.0) -> float:
    """First x > 0 where u' vanishes along the shot; oracle for the time map."""

    def event(x: float, y: np.ndarray) -> float:
        return y[1]

    event.terminal = True
    event.direction = -1.0
    y0 = np.array([0.0, params.alpha, 0.0, params.beta])
    sol = solve_ivp(
        _rhs,
        (0.0, x_max),
        y0,
        method="DOP853",
        rtol=1e-11,
        atol=1e-13,
        events=[event],
    )
    if not sol.t_events[0].size:
        raise DomainError(f"slope did not vanish before x = {x_max}")
    return float(sol.t_events[0][0])


def series_vs_quadrature(alpha: float) -> tuple[float, float]:
    """Both sides of the hypergeometric moment identity.

    LHS: int_0^1 t (1-t)^(-1/2) alpha^2 (1 + alpha^2 t^2)^(-5/4) dt by
    singularity-removing quadrature.  RHS: the closed hypergeometric form
    (4/3) alpha^2 2F1[1, 3/2; 7/4; -alpha^2], which the Pfaff transform
    maps onto a convergent series.
    """
    if not alpha > 0:
        raise DomainError(f"alpha must be > 0, got {alpha}")
    a2 = alpha * alpha

    def f(s: np.ndarray) -> np.ndarray:
        t = 1.0 - s * s
        return 2.0 * t * a2 * (1.0 + a2 * t * t) ** -1.25

    lhs = adaptive_gauss(f, 0.0, 1.0)
    rhs = (4.0 / 3.0) * a2 * gauss_2f1(1.0, 1.5, 1.75, -a2)
    return lhs, rhs
