"""One-hot graph encoder embedding and L2 row normalization.

The embedding is Z = A W with W(i, k) = 1 / n_k when vertex i carries label k.
Neither A nor W is materialized: a single pass over the edge list adds each
edge's weight, scaled by the size of the neighbour's class, into the row of
the other endpoint.
"""
import logging

import numpy as np
from sklearn.preprocessing import normalize as l2_normalize

from .errors import EmbeddingError, LabelError
from .graph import class_counts
from .models import Embedding

logger = logging.getLogger(__name__)


def one_hot_embed(g, y):
    """Return the n x K encoder embedding of `g` under labels `y`.

    Columns of empty classes are identically zero. Undirected self-loops
    contribute once.
    """
    if y.k < 1:
        raise LabelError('label alphabet must have K >= 1')
    if y.n_vertices != g.n_vertices:
        raise LabelError(f'label vector has {y.n_vertices} entries for {g.n_vertices} vertices')
    if not y.is_fully_assigned:
        raise LabelError('every vertex needs an assigned label to be embedded')

    n, k = g.n_vertices, y.k
    counts = class_counts(y)
    scale = np.zeros(k, dtype=np.float64)
    scale[counts > 0] = 1.0 / counts[counts > 0]
    col = y.zero_based()

    # flat (row * k + column) cells so one bincount performs the whole pass
    target_col = col[g.targets]
    cells = g.sources * k + target_col
    values = g.weights * scale[target_col]
    if not g.directed:
        mirror = g.sources != g.targets
        source_col = col[g.sources[mirror]]
        cells = np.concatenate([cells, g.targets[mirror] * k + source_col])
        values = np.concatenate([values, g.weights[mirror] * scale[source_col]])

    z = np.bincount(cells, weights=values, minlength=n * k).reshape(n, k)
    logger.debug('Embedded %d vertices into %d dimensions from %d edges', n, k, g.n_edges)
    return Embedding(z, normalized=False)


def normalize(z):
    """Scale every nonzero row to unit L2 norm; zero rows stay zero."""
    if not np.all(np.isfinite(z.values)):
        raise EmbeddingError('cannot normalize an embedding with non-finite entries')
    if z.values.size == 0:
        return Embedding(z.values, normalized=True)
    return Embedding(l2_normalize(z.values, norm='l2', axis=1, copy=True), normalized=True)
