import numpy as np
import pytest

from mixclust.families import GaussianDiagonal, Laplace, Poisson
from mixclust.model import MixtureSpec


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def poisson_spec(*rates):
    return MixtureSpec(Poisson(), np.array(rates, dtype=float).reshape(len(rates), -1))


def laplace_spec(locs, scale=1.0):
    locs = np.asarray(locs, dtype=float)
    if locs.ndim == 1:
        locs = locs[:, None]
    params = np.stack([locs, np.full_like(locs, scale)], axis=-1)
    return MixtureSpec(Laplace(), params)


def gaussian_spec(locs, sd=1.0):
    locs = np.asarray(locs, dtype=float)
    if locs.ndim == 1:
        locs = locs[:, None]
    params = np.stack([locs, np.full_like(locs, sd)], axis=-1)
    return MixtureSpec(GaussianDiagonal(), params)


ACCEPTANCE_LINES: list = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
