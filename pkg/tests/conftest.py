import numpy as np
import pytest

from plasmon_kerr.model import SystemParams
from plasmon_kerr.plasmon_env import PlasmonEnvironment, environment_at, free_space, synthetic_fixture


@pytest.fixture
def sys_default():
    return SystemParams(omega32=0.0, gamma_prime=0.3)


@pytest.fixture
def free():
    return free_space()


@pytest.fixture
def plasmonic():
    return PlasmonEnvironment.explicit(0.8, 0.6)


@pytest.fixture
def fixture_table():
    return synthetic_fixture()


@pytest.fixture
def fixture_env(fixture_table):
    return environment_at(fixture_table, 0.4)


def random_hermitian_state(rng, n=4):
    a = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    rho = a @ a.conj().T
    return rho / np.trace(rho)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(RESULTS):
        for line in RESULTS[n]:
            terminalreporter.write_line(line)
