import logging
import math

import numpy as np
import pytest

from catgen import analytic, closed
from catgen.presets import PRESETS, resolve_params, resolve_time

# truncation warnings at n_d = 14 are expected for the closed presets
logging.getLogger("catgen").setLevel(logging.ERROR)


def preset_params(name, **overrides):
    return resolve_params(PRESETS[name].values(overrides))


@pytest.fixture(scope="session")
def w200():
    return preset_params("fig3a_w200")


@pytest.fixture(scope="session")
def w200_solution(w200):
    return analytic.rwa_solution(w200)


@pytest.fixture(scope="session")
def t_s(w200):
    return resolve_time("t_s", w200)


@pytest.fixture(scope="session")
def w200_at_ts(w200, t_s):
    """Full-Hamiltonian state at t_s for the w_r/g_0 = 200 working point."""
    return closed.integrate(w200, closed.IntegratorConfig(n_d=14), t_s, times=[t_s])


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def random_state(rng, n_d):
    psi = rng.normal(size=(2, n_d + 1)) + 1j * rng.normal(size=(2, n_d + 1))
    return psi / math.sqrt(np.sum(np.abs(psi) ** 2))


def random_density(rng, dim, rank=3):
    v = rng.normal(size=(dim, rank)) + 1j * rng.normal(size=(dim, rank))
    rho = v @ v.conj().T
    return rho / np.trace(rho).real


# one line per acceptance criterion, filled by test_acceptance.report
ACCEPTANCE_LINES = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[n])
