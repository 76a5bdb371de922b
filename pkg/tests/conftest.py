import numpy as np
import pytest


def pytest_configure(config):
    config.addinivalue_line(
        "markers", "slow: exhaustive sweeps that take minutes; run with -m slow"
    )


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
