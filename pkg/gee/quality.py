"""Clustering quality: minimal rank index, adjusted Rand index, silhouette."""
from dataclasses import dataclass

import numpy as np
from scipy.spatial.distance import cdist
from sklearn.metrics import adjusted_rand_score, silhouette_score
from sklearn.metrics.cluster import contingency_matrix

from .config import CENTROID_MODES
from .errors import LabelError, QualityError
from .models import Embedding, LabelVector


@dataclass(frozen=True)
class ClusterMeans:
    """Per-cluster centroids; rows whose count is 0 are absent, not zero."""
    means: np.ndarray
    counts: np.ndarray

    @property
    def present(self):
        return self.counts > 0


def _values(z):
    return z.values if isinstance(z, Embedding) else np.asarray(z, dtype=np.float64)


def _labels(y):
    if isinstance(y, LabelVector):
        return y
    array = np.asarray(y, dtype=np.int64)
    return LabelVector(array, int(array.max()) if array.size else 0)


def cluster_means(z, y, centroid='mean'):
    """Centroid of every cluster: the arithmetic mean, or the bare sum."""
    if centroid not in CENTROID_MODES:
        raise QualityError(f'centroid must be one of {CENTROID_MODES}, got {centroid!r}')
    x = _values(z)
    y = _labels(y)
    if y.n_vertices != x.shape[0]:
        raise LabelError(f'{y.n_vertices} labels for {x.shape[0]} embedding rows')
    col = y.zero_based()
    counts = np.bincount(col, minlength=y.k)
    sums = np.zeros((y.k, x.shape[1]))
    np.add.at(sums, col, x)
    if centroid == 'mean':
        present = counts > 0
        sums[present] /= counts[present, None]
    return ClusterMeans(means=sums, counts=counts)


def mri(z, y, centroid='mean'):
    """Minimal rank index: share of vertices not nearest to their own centroid.

    Only nonempty clusters compete, and a vertex equally close to its own
    centroid and another one counts as correctly placed.
    """
    x = _values(z)
    y = _labels(y)
    if not y.is_fully_assigned:
        raise LabelError('minimal rank index needs every vertex labelled')
    if x.shape[0] == 0:
        raise QualityError('cannot score an empty embedding')
    centres = cluster_means(x, y, centroid)
    present = centres.present
    if not present.any():
        raise QualityError('all clusters are empty')

    distances = cdist(x, centres.means, 'sqeuclidean')
    distances[:, ~present] = np.inf
    own = distances[np.arange(x.shape[0]), y.zero_based()]
    misplaced = distances.min(axis=1) < own
    return float(np.count_nonzero(misplaced)) / x.shape[0]


def ari(y1, y2):
    a, b = _labels(y1), _labels(y2)
    if a.n_vertices != b.n_vertices:
        raise LabelError(f'label vectors differ in length: {a.n_vertices} vs {b.n_vertices}')
    if not (a.is_fully_assigned and b.is_fully_assigned):
        raise LabelError('adjusted Rand index needs every vertex labelled')
    return float(adjusted_rand_score(a.labels, b.labels))


def same_partition(y1, y2):
    """True when the partitions agree up to relabeling (ARI exactly 1)."""
    a, b = _labels(y1), _labels(y2)
    if a.n_vertices != b.n_vertices:
        raise LabelError(f'label vectors differ in length: {a.n_vertices} vs {b.n_vertices}')
    table = contingency_matrix(a.labels, b.labels)
    occupied = np.count_nonzero(table)
    return occupied == table.shape[0] == table.shape[1]


def silhouette(z, y):
    """Mean silhouette width over all vertices, Euclidean distance on rows.

    Singleton clusters contribute 0, as do points whose intra- and
    nearest-cluster mean distances are both 0.
    """
    x = _values(z)
    y = _labels(y)
    if not y.is_fully_assigned:
        raise LabelError('silhouette needs every vertex labelled')
    n_clusters = np.unique(y.labels).size
    if n_clusters < 2:
        raise QualityError(f'silhouette needs at least 2 nonempty clusters, got {n_clusters}')
    if n_clusters == x.shape[0]:
        return 0.0
    return float(silhouette_score(x, y.labels, metric='euclidean'))
