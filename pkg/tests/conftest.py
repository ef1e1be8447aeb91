"""
Shared fixtures for the test suite
"""

import numpy as np
import pytest

from utils.engel import zeta
from utils.maxwell import critical_moduli


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: long numerical sweeps (deselect with -m 'not slow')")


@pytest.fixture
def rng():
    """Seeded generator; every test gets the same stream"""
    return np.random.default_rng(20240611)


@pytest.fixture(scope="session")
def moduli():
    """(k0, k1)"""
    return critical_moduli()


@pytest.fixture(scope="session")
def zeta_certificate():
    return zeta()