import numpy as np
import pytest
from hypothesis import HealthCheck, settings

import ngg

settings.register_profile(
    "fast",
    max_examples=25,
    deadline=None,
    derandomize=True,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("fast")


@pytest.fixture(scope="session")
def sphere3():
    return ngg.sphere(3)


@pytest.fixture(scope="session")
def basis3():
    return ngg.harmonic_basis(ngg.sphere(3), 16)


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(20240811)
