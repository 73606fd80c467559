import os

import numpy as np
import pytest


@pytest.fixture(scope="session", autouse=True)
def _isolated_cache(tmp_path_factory):
    # keep the transform cache out of the user's home while testing
    path = tmp_path_factory.mktemp("swcache")
    old = os.environ.get("DISTINGUISH_CACHE")
    os.environ["DISTINGUISH_CACHE"] = str(path)
    yield path
    if old is None:
        os.environ.pop("DISTINGUISH_CACHE", None)
    else:
        os.environ["DISTINGUISH_CACHE"] = old


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
