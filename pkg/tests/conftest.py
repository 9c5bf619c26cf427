"""Shared fixtures and markers."""

import numpy as np
import pytest

from src.models import StateSpaceModel
from src.systems.sslib import spectral_radius


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: full design runs (deselect with -m 'not slow')")


@pytest.fixture
def rng():
    return np.random.default_rng(20240607)


def random_schur_system(rng, n, m=1, p=1, radius=0.8, dt=1.0):
    """Random discrete system whose A has spectral radius `radius`."""
    A = rng.standard_normal((n, n))
    A *= radius / spectral_radius(A)
    B = rng.standard_normal((n, m))
    C = rng.standard_normal((p, n))
    D = 0.1 * rng.standard_normal((p, m))
    return StateSpaceModel(A, B, C, D, dt)


@pytest.fixture
def make_system(rng):
    def make(n, m=1, p=1, radius=0.8, dt=1.0):
        return random_schur_system(rng, n, m, p, radius, dt)
    return make
