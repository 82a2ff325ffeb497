import numpy as np
import pytest

from kahlercheck import models


@pytest.fixture(scope="session")
def flat2():
    return models.build_model("builtin:flat:2")


@pytest.fixture(scope="session")
def flat3():
    return models.build_model("builtin:flat:3")


@pytest.fixture(scope="session")
def fs2():
    return models.build_model("builtin:fs:2")


@pytest.fixture(scope="session")
def fs3():
    return models.build_model("builtin:fs:3")


@pytest.fixture(scope="session")
def chyp2():
    return models.build_model("builtin:chyp:2")


@pytest.fixture(scope="session")
def chyp3():
    return models.build_model("builtin:chyp:3")


@pytest.fixture(scope="session")
def product():
    return models.build_model("builtin:product:fs:1:fs:2")


@pytest.fixture()
def rng():
    return np.random.default_rng(20260810)
