import numpy as np
import pytest

from liegeo import surfaces
from liegeo.cauchy_solver import CauchyData, prolong, random_cauchy_data
from liegeo.lie_core import random_group_element


@pytest.fixture
def rng():
    return np.random.default_rng(20221017)

@pytest.fixture
def group_element(rng):
    return random_group_element(rng, 0.4)

@pytest.fixture
def ellipsoid():
    return surfaces.ellipsoid(33, 33)

@pytest.fixture
def zero_data():
    return CauchyData.zero()

@pytest.fixture
def random_data():
    return random_cauchy_data(seed=3, order=6, scale=0.3)

@pytest.fixture
def random_jet(random_data):
    return prolong(random_data, 5)
