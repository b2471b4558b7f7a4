import numpy as np
import pytest

from rbl.ambiguity import MeanMadSpec


@pytest.fixture(scope="session")
def half_spec():
    # mu = 1, d = 0.5: the light-dispersion workhorse, alpha_min = 0.25
    return MeanMadSpec(1.0, 0.5)


@pytest.fixture(scope="session")
def wide_spec():
    # d > mu: the dispersed regime where the zero-low-point member is feasible
    return MeanMadSpec(1.0, 1.5)


@pytest.fixture()
def rng():
    return np.random.default_rng(20260816)
