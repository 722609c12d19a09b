import random

import pytest

from fogsec.pairing import setup_pairing


@pytest.fixture(scope="session")
def mock():
    return setup_pairing("mock", b"tests")


@pytest.fixture(scope="session")
def curve():
    return setup_pairing("curve")


@pytest.fixture(params=["mock", "curve"], scope="session")
def params(request, mock, curve):
    return mock if request.param == "mock" else curve


@pytest.fixture
def rng():
    return random.Random(1234)


def log_of(elem):
    """Discrete log of a mock-backend element."""
    assert elem.params.backend_id == "mock"
    return elem.value
