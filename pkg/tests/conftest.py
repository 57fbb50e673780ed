import numpy as np
import pytest
from hypothesis import settings

from pseudopower.dirac import PotentialSpec, derive_potential_data
from pseudopower.grids import Grid2D
from pseudopower.transmutation import OperatorSet

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")

LINEAR = dict(kind="linear", params=(1.0,), m=0.5, omega=1.0)
SINE = dict(kind="sine", params=(1.0, np.pi), m=0.5, omega=1.0)


def potential_data(n, spec=LINEAR, a=1.0):
    return derive_potential_data(PotentialSpec(**spec), Grid2D.square(a, n))


def operators(data):
    return OperatorSet.build(data.f, data.g, data.q, data.q_tilde, data.df, data.dg)


@pytest.fixture(scope="session")
def linear101():
    return potential_data(101)


@pytest.fixture(scope="session")
def ops101(linear101):
    return operators(linear101)


@pytest.fixture(scope="session")
def free101():
    return potential_data(101, dict(kind="zero"))
