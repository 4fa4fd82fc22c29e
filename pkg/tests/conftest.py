import random

import pytest

import wps
from wps.engine import training_env
from wps.experiment import load_config

CONFIG_PATH = "configs/default.json"


@pytest.fixture(scope="session")
def default_config():
    return load_config(CONFIG_PATH)


@pytest.fixture(scope="session")
def trained_default(default_config):
    """Policy trained once on the default 5x5 warehouse, shared by all tests."""
    q, curve = wps.train(
        training_env(default_config.world),
        default_config.qparams,
        random.Random(default_config.base_seed),
    )
    return q, curve


def world_3x3(shelf=(2, 1), qty=5):
    return wps.build_warehouse(3, 3, [shelf], (0, 0), {"A": (shelf, qty)})


@pytest.fixture()
def small_world():
    return world_3x3()
