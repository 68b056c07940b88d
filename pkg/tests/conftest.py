import numpy as np
import pytest
from hypothesis import settings

from dofsim.assignment import MessageAssignment
from dofsim.network import NetworkRealization, NetworkTopology

settings.register_profile("default", max_examples=200, deadline=None)
settings.load_profile("default")


def realization(K, present_links, deactivate=False):
    return NetworkRealization.from_links(NetworkTopology(K, deactivate), present_links)


def random_pair_assignment(rng, K, singles=False):
    """Random assignment whose sets lie in the window ``i-2..i+1``."""
    sets = []
    for i in range(1, K + 1):
        opts = [(i - 2, i - 1), (i - 1, i), (i, i + 1)]
        if singles:
            opts += [(i - 1,), (i,), (i - 2,), (i + 1,)]
        opts = [c for c in (tuple(t for t in s if 1 <= t <= K) for s in opts) if c]
        sets.append(opts[rng.integers(len(opts))])
    return MessageAssignment(K, sets)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
