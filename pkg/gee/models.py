"""In-memory graph, label and embedding types shared by every module.

All three are immutable: their arrays are copied on construction and marked
read-only, so instances can be shared between worker threads.
"""
from dataclasses import dataclass

import numpy as np

from .errors import EmbeddingError, GraphValidationError, LabelError

UNASSIGNED = 0


def _frozen(array, dtype):
    out = np.array(array, dtype=dtype, copy=True)
    out.setflags(write=False)
    return out


@dataclass(frozen=True, eq=False)
class EdgeList:
    """Sparse graph: parallel source/target/weight arrays, 0-based vertices.

    Undirected edges are stored once with source <= target; consumers apply
    them symmetrically. Duplicate edges are kept.
    """
    n_vertices: int
    sources: np.ndarray
    targets: np.ndarray
    weights: np.ndarray
    directed: bool = False

    def __post_init__(self):
        n = int(self.n_vertices)
        if n < 1:
            raise GraphValidationError(f'n_vertices must be >= 1, got {self.n_vertices}')
        sources = np.asarray(self.sources, dtype=np.int64).reshape(-1)
        targets = np.asarray(self.targets, dtype=np.int64).reshape(-1)
        weights = np.asarray(self.weights, dtype=np.float64).reshape(-1)
        if not (len(sources) == len(targets) == len(weights)):
            raise GraphValidationError('sources, targets and weights must have equal length')
        if len(sources):
            low = min(sources.min(), targets.min())
            high = max(sources.max(), targets.max())
            if low < 0 or high >= n:
                raise GraphValidationError(
                    f'vertex index out of range [0, {n - 1}]: saw {low if low < 0 else high}')
        if not np.all(np.isfinite(weights)):
            raise GraphValidationError('edge weights must be finite')
        if not self.directed:
            sources, targets = np.minimum(sources, targets), np.maximum(sources, targets)
        object.__setattr__(self, 'n_vertices', n)
        object.__setattr__(self, 'directed', bool(self.directed))
        object.__setattr__(self, 'sources', _frozen(sources, np.int64))
        object.__setattr__(self, 'targets', _frozen(targets, np.int64))
        object.__setattr__(self, 'weights', _frozen(weights, np.float64))

    @classmethod
    def from_edges(cls, n_vertices, edges, directed=False):
        """Build from (u, v) or (u, v, w) tuples with 0-based vertices."""
        rows = [tuple(edge) for edge in edges]
        sources = [row[0] for row in rows]
        targets = [row[1] for row in rows]
        weights = [row[2] if len(row) > 2 else 1.0 for row in rows]
        return cls(n_vertices, sources, targets, weights, directed)

    @property
    def n_edges(self):
        return len(self.weights)

    @property
    def is_binary(self):
        return bool(np.all(self.weights == 1.0))

    def edges(self):
        return list(zip(self.sources.tolist(), self.targets.tolist(), self.weights.tolist()))

    def __eq__(self, other):
        if not isinstance(other, EdgeList):
            return NotImplemented
        return (
            self.n_vertices == other.n_vertices
            and self.directed == other.directed
            and np.array_equal(self.sources, other.sources)
            and np.array_equal(self.targets, other.targets)
            and np.array_equal(self.weights, other.weights)
        )

    __hash__ = None

    def __repr__(self):
        kind = 'directed' if self.directed else 'undirected'
        return f'EdgeList(n_vertices={self.n_vertices}, n_edges={self.n_edges}, {kind})'


@dataclass(frozen=True, eq=False)
class LabelVector:
    """Community labels in 1..k per vertex; 0 marks an unassigned vertex."""
    labels: np.ndarray
    k: int

    def __post_init__(self):
        labels = np.asarray(self.labels)
        if labels.ndim != 1:
            raise LabelError('labels must be one-dimensional')
        if labels.size and not np.issubdtype(labels.dtype, np.integer):
            as_int = labels.astype(np.int64)
            if not np.array_equal(as_int, labels):
                raise LabelError('labels must be integers')
            labels = as_int
        k = int(self.k)
        if k < 0:
            raise LabelError(f'k must be >= 0, got {self.k}')
        if labels.size and (labels.min() < UNASSIGNED or labels.max() > k):
            raise LabelError(f'labels must lie in [1, {k}] or be {UNASSIGNED} (unassigned)')
        object.__setattr__(self, 'labels', _frozen(labels, np.int64))
        object.__setattr__(self, 'k', k)

    @classmethod
    def from_zero_based(cls, labels, k):
        return cls(np.asarray(labels, dtype=np.int64) + 1, k)

    def __len__(self):
        return len(self.labels)

    @property
    def n_vertices(self):
        return len(self.labels)

    @property
    def is_fully_assigned(self):
        return bool(np.all(self.labels != UNASSIGNED))

    def zero_based(self):
        if not self.is_fully_assigned:
            raise LabelError('label vector has unassigned vertices')
        return self.labels - 1

    def __eq__(self, other):
        if not isinstance(other, LabelVector):
            return NotImplemented
        return self.k == other.k and np.array_equal(self.labels, other.labels)

    __hash__ = None

    def __repr__(self):
        return f'LabelVector(n_vertices={self.n_vertices}, k={self.k})'


@dataclass(frozen=True, eq=False)
class Embedding:
    """Dense n x K vertex representation; `normalized` records L2 row scaling."""
    values: np.ndarray
    normalized: bool = False

    def __post_init__(self):
        values = np.asarray(self.values, dtype=np.float64)
        if values.ndim != 2:
            raise EmbeddingError(f'embedding must be two-dimensional, got shape {values.shape}')
        if not np.all(np.isfinite(values)):
            raise EmbeddingError('embedding entries must be finite')
        object.__setattr__(self, 'values', _frozen(values, np.float64))
        object.__setattr__(self, 'normalized', bool(self.normalized))

    @property
    def n_vertices(self):
        return self.values.shape[0]

    @property
    def k(self):
        return self.values.shape[1]

    def __eq__(self, other):
        if not isinstance(other, Embedding):
            return NotImplemented
        return self.normalized == other.normalized and np.array_equal(self.values, other.values)

    __hash__ = None

    def __repr__(self):
        return f'Embedding(shape={self.values.shape}, normalized={self.normalized})'
