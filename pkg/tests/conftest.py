import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "repo",
    deadline=None,
    derandomize=True,
    max_examples=40,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("repo")


@pytest.fixture
def unit_square():
    from kadets.geom import HPolyhedron

    return HPolyhedron.box([0.0, 0.0], [1.0, 1.0])


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
