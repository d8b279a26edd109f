import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from cylred.config import build_model, parse_config
from cylred.momentum import build_instance

settings.register_profile("default", deadline=None, max_examples=40,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


def load(name):
    return build_model(parse_config(name))


@pytest.fixture(scope="session")
def t4():
    return load("t4_example")


@pytest.fixture(scope="session")
def t4_inst(t4):
    return build_instance(t4)


@pytest.fixture(scope="session")
def toy():
    return load("t2xt2_example")


@pytest.fixture(scope="session")
def toy_inst(toy):
    return build_instance(toy)


@pytest.fixture(scope="session")
def area():
    return load("t2_area")


@pytest.fixture
def rng():
    return np.random.default_rng(0)
