import math

import numpy as np
import pytest
from hypothesis import settings

from hoferlab.local_model import ModelConfig

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")


@pytest.fixture(scope="session")
def cfg2():
    return ModelConfig.uniform(2, 1.0, 3)


@pytest.fixture(scope="session")
def cfg3():
    return ModelConfig.uniform(3, 1.0, 3)


@pytest.fixture(scope="session")
def cfg_sigma():
    return ModelConfig.uniform(2, 1.0, 3, sigma_mode=True)


@pytest.fixture
def rng():
    return np.random.default_rng(20241017)


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = next((m for name, m in sys.modules.items() if name.endswith("test_acceptance")), None)
    results = getattr(mod, "RESULTS", {})
    if results:
        terminalreporter.section("acceptance criteria")
        for number in sorted(results):
            terminalreporter.write_line(results[number])
