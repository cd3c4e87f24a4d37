"""Shared fixtures: expensive profiles and minimizers built once per session."""

import numpy as np
import pytest

from elastic_obstacle.obstacle import ObstacleSC, minimize
from elastic_obstacle.shooting import reconstruct_profile


@pytest.fixture(scope="session")
def profile_alpha1():
    """Reference profile at alpha = 1 on the standard 2001-point grid."""
    return reconstruct_profile(1.0, 2001)


@pytest.fixture(scope="session")
def obstacle_h03():
    return ObstacleSC(psi0=-0.1, psiHalf=0.3)


@pytest.fixture(scope="session")
def minimizer_h03_401(obstacle_h03):
    return minimize(obstacle_h03, 401)


@pytest.fixture(scope="session")
def minimizer_h03_201(obstacle_h03):
    return minimize(obstacle_h03, 201)


@pytest.fixture()
def rng():
    return np.random.default_rng(20260826)
