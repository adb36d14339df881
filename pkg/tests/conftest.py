import numpy as np
import pytest

from psq.grid import centred_axes


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture(scope="session")
def axes_1d():
    return centred_axes(1, 257, 8.0)


def random_symplectic(rng, L):
    """Product of random shears and rotations, symplectic by construction."""
    from scipy.linalg import expm

    from psq.symplectic import symplectic_form

    A = rng.normal(size=(2 * L, 2 * L)) * 0.4
    S = 0.5 * (A + A.T)
    return expm(symplectic_form(L) @ S)


def pytest_terminal_summary(terminalreporter):
    mod = __import__("sys").modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
