import pytest

from branchcalc.tree import PrimeSequence


@pytest.fixture
def desk():
    return PrimeSequence([7, 11, 13])


@pytest.fixture
def small():
    return PrimeSequence([7, 11])


@pytest.fixture
def deep():
    return PrimeSequence([7, 11, 13, 17, 19])


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: exhaustive comparisons against brute-force oracles")
