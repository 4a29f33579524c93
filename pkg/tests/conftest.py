import pytest

from taskforge.data import bundle_paths
from taskforge.dsl import load_bundle
from taskforge.physical import RobotModel


@pytest.fixture(scope="session")
def pick_place():
    return load_bundle(**bundle_paths("pick_place"))


@pytest.fixture(scope="session")
def mini():
    return load_bundle(**bundle_paths("mini"))


@pytest.fixture(scope="session")
def robot():
    return RobotModel()
