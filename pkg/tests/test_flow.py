"""Gradient flow: stability guard, discrete gradient, dissipation, bounds."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from elastic_obstacle import _kernels_py, kernels
from elastic_obstacle.flow import (
    FlowConfig,
    FlowState,
    fd_energy,
    gradient_W,
    h2_distance,
    initial_cap,
    run_flow,
    slope_bound,
    stability_dt,
    step,
)
from elastic_obstacle.obstacle import ObstacleSC, first_variation
from elastic_obstacle.specfun import DomainError, c0, g_inv


def _xs(n):
    return np.linspace(0.0, 1.0, n)


class TestConfig:
    def test_default_dt(self):
        cfg = FlowConfig(n=201)
        assert cfg.dt == pytest.approx(stability_dt(201))

    def test_stability_guard(self):
        h = 1.0 / 200.0
        with pytest.raises(DomainError):
            FlowConfig(n=201, dt=h ** 4 / 8.0)

    def test_validation(self):
        with pytest.raises(DomainError):
            FlowConfig(n=5)
        with pytest.raises(DomainError):
            FlowConfig(n=201, t_end=0.0)
        with pytest.raises(DomainError):
            FlowConfig(n=201, record_every=0)


class TestGradient:
    def test_zero(self):
        n = 101
        assert np.all(gradient_W(np.zeros(n), _xs(n)) == 0.0)

    def test_grid_too_small(self):
        with pytest.raises(DomainError):
            gradient_W(np.zeros(5), _xs(5))

    def test_duality_with_first_variation(self):
        # <grad W(u), phi> h-weighted ~ first variation in direction phi,
        # with the mismatch shrinking at second order under refinement
        gaps = []
        for n in (401, 801):
            xs = _xs(n)
            h = xs[1] - xs[0]
            u = 0.2 * np.sin(np.pi * xs)
            phi = 0.05 * np.sin(2.0 * np.pi * xs) ** 2
            lhs = h * float(np.sum(gradient_W(u, xs) * phi))
            rhs = first_variation(u, u + phi, xs)
            assert lhs == pytest.approx(rhs, abs=50.0 * h ** 2)
            gaps.append(abs(lhs - rhs))
        assert gaps[0] / gaps[1] >= 3.0

    def test_near_stationary_at_minimizer(self, minimizer_h03_201):
        p = minimizer_h03_201
        g = gradient_W(p.u, p.xs)
        sel = (p.xs > 0.02) & (p.xs < 0.45)
        # the profile solves the Euler-Lagrange equation away from the
        # midpoint kink; the discrete operator sees it as O(h^2)-stationary
        scale = float(np.max(np.abs(g)))
        assert float(np.max(np.abs(g[sel]))) <= 1e-3 * scale


class TestStep:
    def _state(self, u, xs, obs, cfg):
        from elastic_obstacle.flow import _state

        return _state(0.0, xs, u, np.asarray(obs.psi(xs)), cfg.proj_tol)

    def test_near_stationarity_at_minimizer(
        self, obstacle_h03, minimizer_h03_201
    ):
        cfg = FlowConfig(n=201)
        st0 = self._state(
            minimizer_h03_201.u.copy(), minimizer_h03_201.xs, obstacle_h03, cfg
        )
        st1 = step(st0, cfg, obstacle_h03)
        assert np.max(np.abs(st1.u - st0.u)) <= 10.0 * cfg.dt / (1.0 / 200.0) ** 2

    def test_projection_activates_only_below(self, obstacle_h03):
        cfg = FlowConfig(n=101)
        xs = _xs(101)
        psi = np.asarray(obstacle_h03.psi(xs))
        u0 = initial_cap(0.3, 101, obstacle_h03)
        st0 = self._state(u0, xs, obstacle_h03, cfg)
        st1 = step(st0, cfg, obstacle_h03)
        unprojected = st0.u - cfg.dt * gradient_W(st0.u, xs)
        changed = st1.u[1:-1] != unprojected[1:-1]
        assert np.all(unprojected[1:-1][changed] <= psi[1:-1][changed])

    def test_symmetry_preserved(self, obstacle_h03):
        cfg = FlowConfig(n=101)
        xs = _xs(101)
        u0 = initial_cap(0.3, 101, obstacle_h03)
        state = self._state(u0, xs, obstacle_h03, cfg)
        for _ in range(20):
            state = step(state, cfg, obstacle_h03)
        assert np.max(np.abs(state.u - state.u[::-1])) <= 1e-12


class TestRunFlow:
    def test_short_run_invariants(self, obstacle_h03):
        n = 101
        cfg = FlowConfig(n=n, t_end=4000 * stability_dt(n), record_every=500)
        u0 = initial_cap(0.3, n, obstacle_h03)
        states = run_flow(u0, cfg, obstacle_h03)
        xs = _xs(n)
        psi = np.asarray(obstacle_h03.psi(xs))
        energies = np.array([s.energy for s in states])
        assert np.all(np.diff(energies) <= 1e-8)
        mstar = slope_bound(u0, xs)
        for s in states:
            assert np.min(s.u - psi) >= -cfg.proj_tol
            assert np.max(np.abs(s.u - s.u[::-1])) <= 1e-9
            assert s.slope_max <= mstar * 1.01

    def test_admissibility_checks(self, obstacle_h03):
        n = 101
        cfg = FlowConfig(n=n, t_end=10 * stability_dt(n))
        xs = _xs(n)
        good = initial_cap(0.3, n, obstacle_h03)
        bad_boundary = good.copy()
        bad_boundary[0] = 0.05
        with pytest.raises(DomainError):
            run_flow(bad_boundary, cfg, obstacle_h03)
        bad_below = good - 0.2
        bad_below[0] = bad_below[-1] = 0.0
        with pytest.raises(DomainError):
            run_flow(bad_below, cfg, obstacle_h03)
        bad_sym = good.copy()
        bad_sym[n // 4] += 1e-3
        with pytest.raises(DomainError):
            run_flow(bad_sym, cfg, obstacle_h03)
        with pytest.raises(DomainError):
            run_flow(good[:-1], cfg, obstacle_h03)

    def test_energy_hypothesis_rejected(self, obstacle_h03):
        n = 101
        cfg = FlowConfig(n=n, t_end=10 * stability_dt(n))
        xs = _xs(n)
        wild = 0.3 * np.sin(np.pi * xs) + 0.2 * np.sin(5 * np.pi * xs) ** 2
        wild = 0.5 * (wild + wild[::-1])
        wild = np.maximum(wild, np.asarray(obstacle_h03.psi(xs)))
        wild[0] = wild[-1] = 0.0
        assert fd_energy(wild, xs) >= c0() ** 2
        with pytest.raises(DomainError):
            run_flow(wild, cfg, obstacle_h03)


class TestSlopeBound:
    def test_zero(self):
        assert slope_bound(np.zeros(101), _xs(101)) == 0.0

    def test_formula(self, obstacle_h03):
        n = 201
        xs = _xs(n)
        u0 = initial_cap(0.3, n, obstacle_h03)
        assert slope_bound(u0, xs) == pytest.approx(
            g_inv(np.sqrt(fd_energy(u0, xs)) / 2.0)
        )

    def test_monotone_in_energy(self):
        n = 201
        xs = _xs(n)
        vals = [
            slope_bound(a * np.sin(np.pi * xs), xs) for a in (0.05, 0.1, 0.2)
        ]
        assert vals[0] < vals[1] < vals[2]


class TestH2Distance:
    def test_identical(self):
        n = 101
        u = np.sin(np.pi * _xs(n))
        assert h2_distance(u, u, _xs(n)) == 0.0

    def test_quadratic_exact(self):
        n = 101
        xs = _xs(n)
        u = np.sin(np.pi * xs)
        c = 0.7
        assert h2_distance(u, u + c * xs * (1.0 - xs), xs) == pytest.approx(
            2.0 * c, rel=1e-12
        )

    def test_grid_mismatch(self):
        with pytest.raises(DomainError):
            h2_distance(np.zeros(5), np.zeros(6), _xs(6))

    @settings(max_examples=30, deadline=None)
    @given(st.integers(min_value=0, max_value=10 ** 6))
    def test_triangle_inequality(self, seed):
        gen = np.random.default_rng(seed)
        n = 51
        xs = _xs(n)
        a, b, c = gen.normal(size=(3, n))
        assert h2_distance(a, c, xs) <= h2_distance(a, b, xs) + h2_distance(
            b, c, xs
        ) + 1e-12


class TestInitialCap:
    def test_admissible_and_symmetric(self, obstacle_h03):
        n = 201
        xs = _xs(n)
        u0 = initial_cap(0.3, n, obstacle_h03)
        psi = np.asarray(obstacle_h03.psi(xs))
        assert u0[0] == 0.0 and u0[-1] == 0.0
        assert np.min(u0 - psi) >= 0.0
        assert np.max(np.abs(u0 - u0[::-1])) == 0.0
        assert fd_energy(u0, xs) < c0() ** 2

    def test_quartic_kept_when_cheap(self):
        obs = ObstacleSC(psi0=-0.1, psiHalf=0.05)
        n = 201
        xs = _xs(n)
        u0 = initial_cap(0.05, n, obs)
        quartic = np.maximum(
            16.0 * 0.05 * xs ** 2 * (1.0 - xs) ** 2, np.asarray(obs.psi(xs))
        )
        quartic[0] = quartic[-1] = 0.0
        assert np.allclose(u0, 0.5 * (quartic + quartic[::-1]))

    def test_sine_fallback_at_03(self, obstacle_h03):
        # the quartic cap at H = 0.3 violates the energy hypothesis
        n = 201
        xs = _xs(n)
        u0 = initial_cap(0.3, n, obstacle_h03)
        sine = np.maximum(
            0.3 * np.sin(np.pi * xs), np.asarray(obstacle_h03.psi(xs))
        )
        sine[0] = sine[-1] = 0.0
        assert np.allclose(u0, 0.5 * (sine + sine[::-1]))


class TestKernels:
    def test_backend_reported(self):
        assert kernels.BACKEND in ("cython", "python")

    def test_compiled_and_fallback_agree(self, obstacle_h03):
        n = 101
        xs = _xs(n)
        psi = np.asarray(obstacle_h03.psi(xs))
        h = xs[1] - xs[0]
        dt = stability_dt(n)
        u_a = initial_cap(0.3, n, obstacle_h03)
        u_b = u_a.copy()
        ra = kernels.flow_steps(u_a, psi, h, dt, 1000, 1e-8)
        rb = _kernels_py.flow_steps(u_b, psi, h, dt, 1000, 1e-8)
        assert ra[0] == rb[0] == 1000
        assert ra[3] == rb[3] is False
        assert np.max(np.abs(u_a - u_b)) <= 1e-13
        assert ra[1] == pytest.approx(rb[1], rel=1e-12)

    def test_instability_detection(self, obstacle_h03):
        # a deliberately oversized step must trip the 10-rise detector
        n = 101
        xs = _xs(n)
        psi = np.asarray(obstacle_h03.psi(xs))
        h = xs[1] - xs[0]
        u = initial_cap(0.3, n, obstacle_h03)
        with np.errstate(over="ignore", invalid="ignore"):
            done, _, max_rise, unstable = _kernels_py.flow_steps(
                u, psi, h, h ** 4, 5000, 1e-8
            )
        assert unstable
        assert max_rise > 0
        assert done < 5000
