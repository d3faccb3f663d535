import math

import numpy as np
import pytest

from qlossless.decomposition import Ensemble
from qlossless.fockstring import FockVector
from qlossless.formats import load_fixture

R2 = 1 / math.sqrt(2)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def plane():
    return load_fixture("plane")


@pytest.fixture
def e_noise():
    return load_fixture("noise")


@pytest.fixture
def classical():
    return load_fixture("classical")


def noise_ensemble(delta):
    a, b = math.sqrt(1 - delta), math.sqrt(delta)
    return Ensemble(((0.5, FockVector({"0": a, "1": b})), (0.5, FockVector({"0": a, "1": -b}))))


def ket(s):
    return FockVector.basis(s)


def plus(*strings):
    return FockVector.superposition(*strings)


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
