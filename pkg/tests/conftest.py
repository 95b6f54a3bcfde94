import warnings

import numpy as np
import pytest

warnings.filterwarnings("ignore", message=".*TBB.*")

from ssie.formulations import CouplingParams, MediumPair, OperatorSet  # noqa: E402
from ssie.mesh import build_current_space, make_icosphere  # noqa: E402

_SPACES = {}


def sphere_space(level, radius=1.0):
    """Current space on an icosphere, shared across the test session."""
    key = (level, radius)
    if key not in _SPACES:
        _SPACES[key] = build_current_space(make_icosphere(level, radius))
    return _SPACES[key]


@pytest.fixture(scope="session")
def space1():
    return sphere_space(1)


@pytest.fixture(scope="session")
def space2():
    return sphere_space(2)


@pytest.fixture(scope="session")
def dielectric():
    """Sphere medium of the end-to-end checks: eps_i/eps_e = 4, kappa_e = 1."""
    return MediumPair(eps_i=4.0, mu_i=1.0, eps_e=1.0, mu_e=1.0)


@pytest.fixture(scope="session")
def ops1(space1, dielectric):
    return OperatorSet(space1, dielectric.kappa_e, dielectric.kappa_i)


@pytest.fixture(scope="session")
def ops2(space2, dielectric):
    return OperatorSet(space2, dielectric.kappa_e, dielectric.kappa_i)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture(scope="session")
def coupling():
    return CouplingParams(1.0, 1j)


# -- acceptance report ---------------------------------------------------------

ACCEPTANCE_LINES = []


@pytest.fixture(scope="session")
def acceptance_log():
    """Collects one summary line per acceptance criterion."""
    return ACCEPTANCE_LINES


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
