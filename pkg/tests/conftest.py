import pytest
from hypothesis import settings

from erwlab.coeffs import coefficients

settings.register_profile("suite", deadline=None, derandomize=True)
settings.load_profile("suite")


@pytest.fixture(scope="session")
def coeffs64():
    return coefficients(64)


@pytest.fixture(scope="session")
def coeffs_big():
    # large enough for every horizon the unit tests touch
    return coefficients(10_100)
