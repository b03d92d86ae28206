import itertools

import hypothesis
import numpy as np
import pytest

from gee.models import EdgeList
from gee.simgen import SimSpec, sample

hypothesis.settings.register_profile('default', deadline=None)
hypothesis.settings.register_profile('fast', max_examples=10, deadline=None)
hypothesis.settings.register_profile('debugger', report_multiple_bugs=False, deadline=None)
hypothesis.settings.load_profile('default')


def clique_edges(vertices):
    return [(u, v) for u, v in itertools.combinations(vertices, 2)]


@pytest.fixture
def two_cliques():
    """Two disconnected 50-vertex cliques: vertices 0-49 and 50-99."""
    edges = clique_edges(range(50)) + clique_edges(range(50, 100))
    return EdgeList.from_edges(100, edges)


@pytest.fixture
def two_cliques_truth():
    return np.repeat([1, 2], 50)


@pytest.fixture(scope='session')
def two_block_draw():
    """Well-separated two-block SBM without degree correction."""
    spec = SimSpec(n=200, B=[[0.3, 0.02], [0.02, 0.3]], labels=np.repeat([1, 2], 100),
                   degree_corrected=False, seed=3)
    return sample(spec)
