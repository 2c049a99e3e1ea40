import os

import hypothesis
import numpy as np
import pytest

from .helpers import small_channel

hypothesis.settings.register_profile(
    "default", max_examples=25, deadline=None
)
hypothesis.settings.register_profile(
    "ci", max_examples=100, deadline=None, derandomize=True
)
hypothesis.settings.register_profile("debugger", report_multiple_bugs=False)
hypothesis.settings.load_profile(
    os.environ.get("HYPOTHESIS_PROFILE", "default")
)


def pytest_configure(config):
    config.addinivalue_line(
        "markers", "slow: acceptance-scale test, runs with MACCANON_SLOW=1"
    )


def pytest_collection_modifyitems(config, items):
    if os.environ.get("MACCANON_SLOW"):
        return
    skip = pytest.mark.skip(reason="set MACCANON_SLOW=1 to run")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def channel2():
    return small_channel()


@pytest.fixture
def channel3():
    return small_channel(users=3, rx=2, tx=1, tones=2, seed=5)
