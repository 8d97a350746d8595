"""Shared fixtures: the heavy bridge stack is built once per session."""

import numpy as np
import pytest

from irrevflow.bridge import standard_bridge
from irrevflow.irreversible import HardyBridgeStack, SpectralCutoff, sqrt_positive
from irrevflow.lyapunov import build_mf_cauchy, build_mf_composed


@pytest.fixture(scope="session")
def bridge1024():
    return standard_bridge(1024)


@pytest.fixture(scope="session")
def bridge512():
    return standard_bridge(512)


@pytest.fixture(scope="session")
def stack1024(bridge1024):
    return HardyBridgeStack(bridge1024, SpectralCutoff(1e-6))


@pytest.fixture(scope="session")
def msp1024(bridge1024):
    return build_mf_cauchy(bridge1024.energy_grid)


@pytest.fixture(scope="session")
def mcomp1024(bridge1024):
    return build_mf_composed(bridge1024)


@pytest.fixture(scope="session")
def mcomp512(bridge512):
    return build_mf_composed(bridge512)


@pytest.fixture(scope="session")
def lam_sp1024(msp1024):
    return sqrt_positive(msp1024)


@pytest.fixture()
def rng():
    return np.random.default_rng(20260825)
