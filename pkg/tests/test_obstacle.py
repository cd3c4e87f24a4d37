"""Obstacle front end: classification, minimization, optimality structure."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from elastic_obstacle.obstacle import (
    ObstacleSC,
    classify,
    energy,
    first_variation,
    minimize,
    residual_EL,
)
from elastic_obstacle.shooting import (
    NoSolutionError,
    ShotProfile,
    beta_star,
    reconstruct_profile,
)
from elastic_obstacle.specfun import DomainError, c_star


def _fd(u, xs):
    h = xs[1] - xs[0]
    du = np.gradient(u, h)
    d2u = np.empty_like(u)
    d2u[1:-1] = (u[2:] - 2.0 * u[1:-1] + u[:-2]) / (h * h)
    d2u[0] = d2u[1]
    d2u[-1] = d2u[-2]
    return du, d2u


class TestObstacleType:
    def test_cone_formula(self):
        obs = ObstacleSC(psi0=-0.2, psiHalf=0.4)
        assert obs.psi(0.0) == -0.2
        assert obs.psi(0.5) == pytest.approx(0.4)
        assert obs.psi(1.0) == -0.2
        assert obs.psi(0.25) == pytest.approx(0.5 * (-0.2) + 0.5 * 0.4)

    def test_reflection_symmetry(self, rng):
        obs = ObstacleSC(psi0=-0.1, psiHalf=0.3)
        x = rng.uniform(0.0, 1.0, 50)
        assert np.allclose(obs.psi(x), obs.psi(1.0 - x))

    def test_validation(self):
        with pytest.raises(DomainError):
            ObstacleSC(psi0=0.1, psiHalf=0.3)
        with pytest.raises(DomainError):
            ObstacleSC(psi0=-0.1, psiHalf=-0.3)


class TestClassify:
    def test_solvable_below(self):
        assert classify(ObstacleSC(psi0=-0.1, psiHalf=0.5)).solvable

    def test_not_solvable_at_threshold(self):
        cls = classify(ObstacleSC(psi0=-0.1, psiHalf=c_star()))
        assert not cls.solvable
        assert cls.margin == pytest.approx(0.0, abs=1e-16)

    def test_boundary_heights(self):
        eps = 1e-12
        assert classify(ObstacleSC(psi0=-0.1, psiHalf=c_star() - eps)).solvable
        assert not classify(
            ObstacleSC(psi0=-0.1, psiHalf=c_star() + eps)
        ).solvable

    @settings(max_examples=50, deadline=None)
    @given(
        st.floats(min_value=1e-6, max_value=2.0),
        st.floats(min_value=1e-6, max_value=2.0),
    )
    def test_monotone(self, h1, h2):
        # solvable at H implies solvable at every smaller positive height
        lo, hi = sorted((h1, h2))
        if classify(ObstacleSC(psi0=-0.1, psiHalf=hi)).solvable:
            assert classify(ObstacleSC(psi0=-0.1, psiHalf=lo)).solvable


class TestMinimize:
    def test_single_point_contact(self, obstacle_h03, minimizer_h03_401):
        p = minimizer_h03_401
        psi = np.asarray(obstacle_h03.psi(p.xs))
        gap = p.u - psi
        m = (len(p.xs) - 1) // 2
        assert abs(gap[m]) <= 1e-8
        assert np.min(np.delete(gap, m)) > 0

    def test_height_and_alpha(self):
        obs = ObstacleSC(psi0=-0.1, psiHalf=0.16)
        p = minimize(obs, 201)
        assert p.height == pytest.approx(0.16, abs=1e-8)
        assert p.alpha == pytest.approx(0.5, abs=0.02)

    def test_concavity(self, minimizer_h03_401):
        p = minimizer_h03_401
        m = (len(p.xs) - 1) // 2
        assert np.all(p.d2u <= 1e-10)
        assert p.d2u[m] < 0

    def test_no_solution(self):
        with pytest.raises(NoSolutionError):
            minimize(ObstacleSC(psi0=-0.1, psiHalf=0.9), 201)


class TestEnergy:
    def test_zero_function(self):
        xs = np.linspace(0.0, 1.0, 101)
        z = np.zeros(101)
        assert energy(z, z, z, xs) == 0.0

    def test_grid_mismatch(self):
        xs = np.linspace(0.0, 1.0, 101)
        z = np.zeros(100)
        with pytest.raises(DomainError):
            energy(z, z, z, xs)

    def test_simpson_vs_trapezoid(self, profile_alpha1):
        p = profile_alpha1
        integrand = p.d2u ** 2 * (1.0 + p.du ** 2) ** -2.5
        trap = np.trapezoid(integrand, p.xs)
        simp = energy(p.u, p.du, p.d2u, p.xs)
        h = p.xs[1] - p.xs[0]
        # both O(h^2)-consistent on sampled data: small mutual gap
        assert abs(trap - simp) <= 10.0 * h ** 2

    def test_minimality_under_bumps(self, obstacle_h03, minimizer_h03_401):
        p = minimizer_h03_401
        xs = p.xs
        bump = np.sin(np.pi * xs) ** 2
        base = energy(p.u, p.du, p.d2u, xs)
        for eps in (1e-2, 1e-3):
            v = p.u + eps * bump
            dv, d2v = _fd(v, xs)
            assert energy(v, dv, d2v, xs) > base


class TestFirstVariation:
    def test_zero_direction(self, minimizer_h03_401):
        p = minimizer_h03_401
        assert first_variation(p.u, p.u, p.xs) == 0.0

    def test_boundary_validation(self, minimizer_h03_401):
        p = minimizer_h03_401
        v = p.u + 1.0
        with pytest.raises(DomainError):
            first_variation(p.u, v, p.xs)

    def test_variational_inequality(self, obstacle_h03, minimizer_h03_401, rng):
        p = minimizer_h03_401
        xs = p.xs
        psi = np.asarray(obstacle_h03.psi(xs))
        H = obstacle_h03.psiHalf
        for _ in range(50):
            if rng.uniform() < 0.5:
                # nonnegative symmetric bump away from the obstacle
                k = int(rng.integers(1, 6))
                amp = float(rng.uniform(0.0, 0.05))
                v = p.u + amp * np.sin(np.pi * xs) ** 2 * np.sin(
                    k * np.pi * xs
                ) ** 2
            else:
                # convex combination toward a smooth admissible competitor:
                # the sine cap A sin(pi x) with A >= H dominates the cone
                # by the chord property, so v stays admissible and phi is
                # smooth enough for the quadrature
                A = float(rng.uniform(H, 2.0 * H))
                theta = float(rng.uniform(0.0, 1.0))
                v = (1.0 - theta) * p.u + theta * A * np.sin(np.pi * xs)
            v = 0.5 * (v + v[::-1])
            assert np.min(v - psi) >= -1e-12
            assert first_variation(p.u, v, xs) >= -1e-6

    def test_gateaux_linear_error(self, minimizer_h03_401):
        p = minimizer_h03_401
        xs = p.xs
        phi = np.sin(np.pi * xs) ** 2
        fv = first_variation(p.u, p.u + phi, xs)
        errs = []
        for eps in (1e-3, 5e-4, 2.5e-4):
            v = p.u + eps * phi
            dv, d2v = _fd(v, xs)
            du, d2u = _fd(p.u, xs)
            diff = (
                energy(v, dv, d2v, xs) - energy(p.u, du, d2u, xs)
            ) / eps
            errs.append(abs(diff - fv))
        # error decreases linearly in eps
        assert errs[0] > errs[1] > errs[2]
        assert errs[0] / errs[2] >= 2.0


class TestResidualEL:
    def test_minimizer_residual(self, profile_alpha1):
        assert residual_EL(profile_alpha1) <= 1e-4

    def test_straight_line_exact(self):
        # u = alpha x has u'' = u''' = 0, so the defect is exactly |rhs|
        a = 1.3
        n = 101
        xs = np.linspace(0.0, 1.0, n)
        bstar = beta_star(a)
        fake = ShotProfile(
            alpha=a,
            beta_star=bstar,
            xs=xs,
            u=a * xs,
            du=np.full(n, a),
            d2u=np.zeros(n),
            d3u_left_half=0.0,
            height=0.5 * a,
            arclength_half=0.5,
            energy=0.0,
        )
        expected = 2.0 * abs(bstar) / (1.0 + a * a) ** 2.5
        assert residual_EL(fake) == pytest.approx(expected, rel=1e-14)

    def test_second_order_refinement(self):
        r_coarse = residual_EL(reconstruct_profile(1.0, 1001))
        r_fine = residual_EL(reconstruct_profile(1.0, 2001))
        assert r_coarse / r_fine >= 3.0  # ~4 for a clean O(h^2) stencil
