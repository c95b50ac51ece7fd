import os
from pathlib import Path

import numpy as np
import pytest

from src.graph.transition import validate_transition_matrix

FIXTURES = Path(__file__).parent / "fixtures"


def pytest_collection_modifyitems(config, items):
    if os.getenv("SZWALK_RUN_SLOW") == "1":
        return
    skip = pytest.mark.skip(reason="set SZWALK_RUN_SLOW=1 to run desk-scale benchmarks")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip)


@pytest.fixture
def fixtures_dir():
    return FIXTURES


@pytest.fixture
def cycle2():
    return validate_transition_matrix([[0.0, 1.0], [1.0, 0.0]])


@pytest.fixture
def cycle3():
    """3-cycle with G_ji = 1/2 off the diagonal."""
    return validate_transition_matrix([[0.0, 0.5, 0.5], [0.5, 0.0, 0.5], [0.5, 0.5, 0.0]])


@pytest.fixture
def random_graph():
    """Factory for seeded dense column-stochastic matrices."""

    def make(n, seed=0):
        rng = np.random.default_rng(seed)
        raw = rng.uniform(0.0, 1.0, size=(n, n))
        return validate_transition_matrix(raw / raw.sum(axis=0))

    return make


@pytest.fixture
def random_state():
    """Factory for seeded random unit-norm complex flattened states."""

    def make(n, seed=0):
        rng = np.random.default_rng(seed)
        v = rng.normal(size=n * n) + 1j * rng.normal(size=n * n)
        return v / np.linalg.norm(v)

    return make
