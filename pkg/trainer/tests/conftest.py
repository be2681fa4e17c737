import os

import pytest

from obit_trainer import load_training_set

FIXTURES = os.path.join(os.path.dirname(__file__), "fixtures")


@pytest.fixture(scope="session")
def fixture_path():
    """Path builder into the checked-in fixture tree."""

    def build(*parts):
        return os.path.join(FIXTURES, *parts)

    return build


@pytest.fixture(scope="session")
def parity_set():
    return load_training_set(os.path.join(FIXTURES, "parity"))


@pytest.fixture(scope="session")
def small_set():
    _, instances = load_training_set(os.path.join(FIXTURES, "train_small"))
    return instances


@pytest.fixture(scope="session")
def heldout_split():
    _, instances = load_training_set(os.path.join(FIXTURES, "heldout"))
    return instances[:48], instances[48:]
