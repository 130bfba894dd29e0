import numpy as np
import pytest

from multinet import MultiplexGraph, strengths


@pytest.fixture
def triangle_2layer():
    """Triangle in layer 0 plus an a-c / c-d path in layer 1."""
    return MultiplexGraph(
        [(0, "a", "b", 1.0), (0, "b", "c", 1.0), (0, "a", "c", 1.0),
         (1, "a", "c", 1.0), (1, "c", "d", 1.0)],
        num_layers=2)


@pytest.fixture
def toy_5node_2layer():
    """Fixed 5-node, 2-layer toy used for distribution-level checks.

    Both layers are connected and contain a triangle, so every kernel's
    chain over present states is irreducible and aperiodic.
    """
    edges = [
        (0, "a", "b", 1.0), (0, "b", "c", 1.0), (0, "a", "c", 1.0),
        (0, "c", "d", 1.0), (0, "d", "e", 1.0),
        (1, "a", "b", 1.0), (1, "b", "e", 1.0), (1, "a", "e", 1.0),
        (1, "b", "d", 1.0), (1, "c", "d", 1.0),
    ]
    return MultiplexGraph(edges, num_layers=2)


@pytest.fixture
def toy_strengths(toy_5node_2layer):
    return strengths(toy_5node_2layer)


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
