import numpy as np
import pytest

from bnmdl.dataset import DiscreteDataset

ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def random_dataset(rng, m, cards):
    cols = [rng.integers(1, c + 1, size=m) for c in cards]
    return DiscreteDataset(np.column_stack(cols), tuple(cards))


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)
