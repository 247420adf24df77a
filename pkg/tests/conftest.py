import os
import sys

import numpy as np
import pytest

sys.path.insert(0, os.path.dirname(__file__))

from fmsr import codec  # noqa: E402
from fmsr.repair import regenerate  # noqa: E402


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


@pytest.fixture
def state4():
    return codec.new_state(4)


@pytest.fixture
def first_repair(state4):
    """Node 1 rebuilt from P21, P31, P41 with fixed, valid coefficients."""
    gamma = np.array([[0, 0], [1, 2], [3, 4], [5, 7]], dtype=np.uint8)
    sel = {2: 1, 3: 1, 4: 1}
    return regenerate(state4, 1, sel, gamma), sel, gamma


@pytest.fixture
def bad_second_repair(first_repair):
    """Node 2 then rebuilt from P'11, P31, P41: the chunks of nodes 1 and 2
    only span three source chunks."""
    state, _, _ = first_repair
    gamma = np.array([[1, 2], [0, 0], [3, 4], [5, 6]], dtype=np.uint8)
    return regenerate(state, 2, {1: 1, 3: 1, 4: 1}, gamma)


def random_file(rng, size):
    return rng.integers(0, 256, size, dtype=np.uint8).tobytes()


ACCEPTANCE = []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for line in ACCEPTANCE:
        terminalreporter.write_line(line)
