import numpy as np
import pytest
from hypothesis import settings

settings.register_profile("pkg", deadline=None)
settings.load_profile("pkg")


@pytest.fixture
def rng():
    return np.random.default_rng(20260822)
