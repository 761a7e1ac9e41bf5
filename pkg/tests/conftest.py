import io

import numpy as np
import pytest

from cocomod import from_edges, load_edge_list


@pytest.fixture
def identity_net():
    """2x2 identity adjacency."""
    return load_edge_list(io.StringIO("a\tp\nb\tq\n"))


@pytest.fixture
def complete_net():
    """Complete 2x2 bipartite network."""
    return load_edge_list(io.StringIO("a\tp\na\tq\nb\tp\nb\tq\n"))


def random_net(rng, m, l, density=0.05):
    """Random sparse 0/1 network with no all-zero guarantee."""
    mask = rng.random((m, l)) < density
    edges = list(zip(*np.nonzero(mask)))
    if not edges:
        edges = [(0, 0)]
    return from_edges(edges, m=m, l=l)


def random_connected_net(rng, m, l, density=0.1):
    """Random network with every degree positive (resamples empty lines)."""
    mask = rng.random((m, l)) < density
    for i in range(m):
        if not mask[i].any():
            mask[i, rng.integers(l)] = True
    for j in range(l):
        if not mask[:, j].any():
            mask[rng.integers(m), j] = True
    return from_edges(list(zip(*np.nonzero(mask))), m=m, l=l)
