import math

import pytest

from rsbcool.params import MechanicalMode, OpticalMode, angular
from rsbcool.constants import CODATA


@pytest.fixture
def sample1():
    optical = OpticalMode.from_linewidth(2 * math.pi * CODATA.c / 970e-9, angular(3.2e6), 1.0)
    return optical, MechanicalMode(angular(73.5e6))


@pytest.fixture
def sample2():
    optical = OpticalMode.from_linewidth(2 * math.pi * CODATA.c / 970e-9, angular(5.8e6), 1.0, radius=38e-6)
    return optical, MechanicalMode(angular(40.6e6), angular(1.3e3), 10e-12)
