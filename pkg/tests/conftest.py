import numpy as np
import pytest

from algebra import make_algebra
from cache_manager import clear_caches


@pytest.fixture
def scalar():
    return make_algebra("scalar")


@pytest.fixture
def matrix2():
    return make_algebra("matrix", 2)


@pytest.fixture
def rng():
    return np.random.default_rng(20240917)


@pytest.fixture(autouse=True)
def fresh_caches():
    yield
    clear_caches()
