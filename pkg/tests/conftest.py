import numpy as np
import pytest

from horocauchy import standard_context


@pytest.fixture(scope="session")
def ctx():
    """Shared 64x64 transform context; treat as read-only."""
    return standard_context(64, 64, 64)


@pytest.fixture(scope="session")
def ctx_small():
    return standard_context(32, 64, 32)


@pytest.fixture()
def rng():
    return np.random.default_rng(20240817)
