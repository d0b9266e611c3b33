import pytest

from delaylab.scaling import make_scale


@pytest.fixture(scope="session")
def k49():
    return make_scale(49)


@pytest.fixture(scope="session")
def k10():
    return make_scale(10)
