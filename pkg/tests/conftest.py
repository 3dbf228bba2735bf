import numpy as np
import pytest

from qtoeplitz.selftest import random_circulant_spec, random_trig_poly


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


@pytest.fixture
def make_trig_poly(rng):
    def _make(d=1, s=1, t=1, degree=1, kernel=None, density=0.5):
        return random_trig_poly(rng, d, s, t, degree, kernel=kernel, density=density)

    return _make


@pytest.fixture
def make_circulant(rng):
    def _make(nvec=(4,), s=1, t=1, support=3):
        return random_circulant_spec(rng, nvec, s, t, support)

    return _make
