"""Lloyd's k-means on embedding rows, the inner clustering step of the ensemble."""
import logging
from dataclasses import dataclass

import numpy as np
from scipy.spatial.distance import cdist
from sklearn.cluster import kmeans_plusplus

from .errors import ClusteringError
from .models import Embedding, LabelVector

logger = logging.getLogger(__name__)

_MONOTONE_SLACK = 1e-9


@dataclass(frozen=True)
class KMeansResult:
    labels: LabelVector
    centroids: np.ndarray
    inertia_history: tuple
    n_iter: int
    converged: bool


def _points(z):
    return z.values if isinstance(z, Embedding) else np.asarray(z, dtype=np.float64)


def _assign(x, centroids):
    # argmin returns the first minimum, so ties go to the lowest cluster index
    return np.argmin(cdist(x, centroids, 'sqeuclidean'), axis=1)


def _means(x, labels, k):
    counts = np.bincount(labels, minlength=k)
    sums = np.zeros((k, x.shape[1]))
    np.add.at(sums, labels, x)
    present = counts > 0
    sums[present] /= counts[present, None]
    return sums, present


def _inertia(x, labels, centroids):
    return float(np.sum((x - centroids[labels]) ** 2))


def _farthest_point(x, centroids, usable):
    distances = cdist(x, centroids[usable], 'sqeuclidean').min(axis=1)
    return int(np.argmax(distances))


def _warm_centroids(x, warm_start, k):
    if warm_start.n_vertices != x.shape[0]:
        raise ClusteringError(
            f'warm start has {warm_start.n_vertices} labels for {x.shape[0]} points')
    if warm_start.k > k:
        raise ClusteringError(f'warm start uses {warm_start.k} classes, more than k={k}')
    centroids, present = _means(x, warm_start.zero_based(), k)
    # empty warm-start classes are seeded one by one at the farthest point
    for j in np.flatnonzero(~present):
        centroids[j] = x[_farthest_point(x, centroids, present)]
        present[j] = True
    return centroids


def _repair_empty(x, labels, centroids, k):
    """Move the point farthest from its centroid into each empty cluster."""
    counts = np.bincount(labels, minlength=k)
    for j in np.flatnonzero(counts == 0):
        distances = np.sum((x - centroids[labels]) ** 2, axis=1)
        donors = counts[labels] > 1
        distances[~donors] = -1.0
        point = int(np.argmax(distances))
        counts[labels[point]] -= 1
        labels[point] = j
        counts[j] = 1
        centroids[j] = x[point]
    return labels


def lloyd(z, cfg, warm_start=None):
    """Run Lloyd iterations and return labels with the per-iteration inertia.

    The inertia is the within-cluster sum of squares measured after each
    centroid update and never increases from one iteration to the next.
    """
    x = _points(z)
    n = x.shape[0]
    k = cfg.k
    if x.ndim != 2:
        raise ClusteringError('k-means expects a two-dimensional point set')
    if not np.all(np.isfinite(x)):
        raise ClusteringError('k-means input has non-finite entries')
    if k > n:
        raise ClusteringError(f'cannot form k={k} clusters from {n} points')

    if warm_start is not None:
        centroids = _warm_centroids(x, warm_start, k)
    else:
        centroids, _ = kmeans_plusplus(x, n_clusters=k, random_state=cfg.seed)
        centroids = np.array(centroids, dtype=np.float64)

    history = []
    converged = False
    n_iter = 0
    for n_iter in range(1, cfg.max_iters + 1):
        labels = _repair_empty(x, _assign(x, centroids), centroids, k)
        updated, _ = _means(x, labels, k)
        inertia = _inertia(x, labels, updated)
        if __debug__ and history:
            assert inertia <= history[-1] + _MONOTONE_SLACK * max(1.0, history[-1]), \
                f'k-means inertia rose from {history[-1]} to {inertia}'
        history.append(inertia)
        shift = float(np.sqrt(np.max(np.sum((updated - centroids) ** 2, axis=1))))
        centroids = updated
        if shift <= cfg.tol:
            converged = True
            break

    labels = _assign(x, centroids)
    logger.debug('k-means k=%d finished after %d iterations (converged=%s, inertia=%.6g)',
                 k, n_iter, converged, history[-1])
    return KMeansResult(
        labels=LabelVector.from_zero_based(labels, k),
        centroids=centroids,
        inertia_history=tuple(history),
        n_iter=n_iter,
        converged=converged,
    )


def kmeans(z, cfg, warm_start=None):
    """Cluster the rows of `z` into `cfg.k` groups, labels in 1..k.

    With `warm_start`, the initial centroids are the class means of those
    labels; otherwise k-means++ seeding from `cfg.seed`.
    """
    return lloyd(z, cfg, warm_start).labels
