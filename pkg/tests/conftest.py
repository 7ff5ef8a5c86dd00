import math

import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from spontaneous_qrng.states import QubitDensity

settings.register_profile(
    "default", max_examples=200, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")


@st.composite
def qubit_states(draw, min_rho11=0.0):
    rho11 = draw(st.floats(min_rho11, 1.0))
    frac = draw(st.floats(0.0, 1.0))
    phase = draw(st.floats(0.0, 2 * math.pi))
    c = math.sqrt(rho11 * (1 - rho11)) * frac
    return QubitDensity(1 - rho11, rho11, complex(c * np.exp(1j * phase)))


gamma_ts = st.floats(0.0, 30.0)
n_bins = st.integers(1, 8)


def random_hermitian(rng, dim):
    a = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    return (a + a.conj().T) / 2


def random_unitary(rng, dim):
    q, r = np.linalg.qr(rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim)))
    return q * (np.diag(r) / np.abs(np.diag(r)))


@pytest.fixture
def rng():
    return np.random.default_rng(20261016)
