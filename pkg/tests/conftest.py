import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from chainhorizon.chain_model import ChainSpec
from chainhorizon.landmarks import spikes

settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

ACCEPTANCE_LINES = []


def random_spec(rng, dim, factor=1.5):
    hi = np.array(spikes(dim)) * factor
    return ChainSpec(dim, tuple(rng.uniform(0.0, hi)))


@pytest.fixture
def rng():
    return np.random.default_rng(20240607)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
