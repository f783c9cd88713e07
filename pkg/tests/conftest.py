import numpy as np
import pytest

from kickedtop import TopConfig


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def config(J, omega, kick=None):
    return TopConfig(J, omega, kick)
