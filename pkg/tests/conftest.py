import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "default", max_examples=25, deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


def assert_series(actual, expected, tol=1e-12):
    actual = np.asarray(getattr(actual, "coeffs", actual), dtype=float)
    expected = np.asarray(expected, dtype=float)
    n = min(actual.shape[0], expected.shape[0])
    np.testing.assert_allclose(actual[:n], expected[:n], rtol=0, atol=tol)
