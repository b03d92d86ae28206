"""Graph encoder ensemble: joint embedding, clustering and cluster-size selection.

For every candidate k and every replicate, labels are drawn at random and the
embed / normalize / k-means step is iterated until the partition stops
changing. Each replicate is scored by the minimal rank index on the embedding
of its final labels; the best replicate represents k, and the smallest index
over all k picks the cluster size, ties going to the larger k.
"""
import logging
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from . import encoder
from .errors import EnsembleError
from .kmeans import kmeans
from .models import Embedding, LabelVector
from .quality import mri, same_partition

logger = logging.getLogger(__name__)

MAX_INIT_ATTEMPTS = 100
PHASES = ('embed', 'kmeans', 'mri')


@dataclass
class ReplicateOutcome:
    k: int
    replicate: int
    embedding: Embedding
    labels: LabelVector
    mri: float
    n_iter: int
    converged: bool
    timing: dict


@dataclass
class KDiagnostics:
    """Best replicate of one candidate k, plus every replicate's score."""
    k: int
    mri: float
    replicate: int
    n_iter: int
    converged: bool
    replicate_mris: tuple
    embedding: Embedding = field(repr=False)
    labels: LabelVector = field(repr=False)

    def to_dict(self):
        return {
            'k': self.k,
            'mri': self.mri,
            'replicate': self.replicate,
            'n_iter': self.n_iter,
            'converged': self.converged,
            'replicate_mris': list(self.replicate_mris),
        }


@dataclass
class EnsembleResult:
    embedding: Embedding
    labels: LabelVector
    k_hat: int
    mri: float
    per_k: dict
    timing: dict

    def summary(self):
        return {
            'k_hat': self.k_hat,
            'mri': self.mri,
            'per_k': {str(k): diag.to_dict() for k, diag in self.per_k.items()},
            'timing': self.timing,
        }


def replicate_rng(seed, k, replicate):
    return np.random.default_rng(np.random.SeedSequence([seed, k, replicate]))


def random_labels(n, k, rng):
    """Uniform labels over 1..k, redrawn until every class is nonempty."""
    for _ in range(MAX_INIT_ATTEMPTS):
        labels = rng.integers(1, k + 1, size=n)
        if np.unique(labels).size == k:
            return LabelVector(labels, k)
    raise EnsembleError(f'could not draw {n} labels covering all {k} classes '
                        f'in {MAX_INIT_ATTEMPTS} attempts')


def embed(g, y, normalize=True):
    z = encoder.one_hot_embed(g, y)
    return encoder.normalize(z) if normalize else z


def run_replicate(g, k, replicate, cfg):
    """One random initialization iterated to a fixed point, then scored."""
    rng = replicate_rng(cfg.seed, k, replicate)
    timing = dict.fromkeys(PHASES, 0.0)
    y = random_labels(g.n_vertices, k, rng)

    converged = False
    n_iter = 0
    for n_iter in range(1, cfg.max_iters + 1):
        start = time.perf_counter()
        z = embed(g, y, cfg.normalize)
        timing['embed'] += time.perf_counter() - start

        start = time.perf_counter()
        kcfg = cfg.kmeans_config(k, int(rng.integers(2 ** 31 - 1)))
        y_next = kmeans(z, kcfg, warm_start=y if cfg.kmeans_init == 'warm' else None)
        timing['kmeans'] += time.perf_counter() - start

        if same_partition(y, y_next):
            converged = True
            break
        y = y_next

    start = time.perf_counter()
    z = embed(g, y, cfg.normalize)
    timing['embed'] += time.perf_counter() - start
    start = time.perf_counter()
    score = mri(z, y, cfg.mri_centroid)
    timing['mri'] += time.perf_counter() - start

    logger.debug('k=%d replicate=%d: mri=%.4f after %d iterations (converged=%s)',
                 k, replicate, score, n_iter, converged)
    return ReplicateOutcome(k, replicate, z, y, score, n_iter, converged, timing)


def _overlap_permutation(reference, labels, k):
    """Greedy maximum-overlap matching of `labels` classes onto `reference` classes."""
    table = np.bincount(labels.zero_based() * k + reference.zero_based(),
                        minlength=k * k).reshape(k, k).astype(np.int64)
    mapping = np.empty(k, dtype=np.int64)
    for _ in range(k):
        source, target = np.unravel_index(int(np.argmax(table)), table.shape)
        mapping[source] = target
        table[source, :] = -1
        table[:, target] = -1
    return mapping


def _average_tied(tied, cfg):
    incumbent = tied[0]
    k = incumbent.k
    total = incumbent.embedding.values.copy()
    for other in tied[1:]:
        mapping = _overlap_permutation(incumbent.labels, other.labels, k)
        aligned = np.empty_like(total)
        aligned[:, mapping] = other.embedding.values
        total += aligned
    z = Embedding(total / len(tied))
    if cfg.normalize:
        z = encoder.normalize(z)
    return z, mri(z, incumbent.labels, cfg.mri_centroid)


def best_replicate(outcomes, cfg):
    """Pick the replicate with the smallest index; the first one is the incumbent."""
    best = outcomes[0]
    for outcome in outcomes[1:]:
        if outcome.mri < best.mri:
            best = outcome
    embedding, score = best.embedding, best.mri
    if cfg.tie_mode == 'average_embedding':
        tied = [best] + [o for o in outcomes if o.mri == best.mri and o is not best]
        if len(tied) > 1:
            embedding, score = _average_tied(tied, cfg)
    return KDiagnostics(
        k=best.k,
        mri=score,
        replicate=best.replicate,
        n_iter=best.n_iter,
        converged=best.converged,
        replicate_mris=tuple(o.mri for o in outcomes),
        embedding=embedding,
        labels=best.labels,
    )


def select_cluster_size(per_k_mri):
    """Smallest index wins; among equal indices the largest k is chosen."""
    if not per_k_mri:
        raise EnsembleError('no candidate cluster sizes to choose from')
    chosen = None
    for k in sorted(per_k_mri):
        if chosen is None or per_k_mri[k] <= per_k_mri[chosen]:
            chosen = k
    return chosen


def fit(g, cfg):
    """Run the full ensemble over `cfg.cluster_range` and return the best model."""
    if not cfg.cluster_range:
        raise EnsembleError('cluster range is empty')
    if g.n_vertices < max(cfg.cluster_range):
        raise EnsembleError(f'graph has {g.n_vertices} vertices, fewer than k={max(cfg.cluster_range)}')

    started = time.perf_counter()
    items = [(k, rep) for k in cfg.cluster_range for rep in range(cfg.replicates)]
    logger.info('Fitting ensemble: k in %s, %d replicates, up to %d iterations, %d thread(s)',
                list(cfg.cluster_range), cfg.replicates, cfg.max_iters, cfg.n_jobs)
    if cfg.n_jobs > 1 and len(items) > 1:
        with ThreadPoolExecutor(max_workers=cfg.n_jobs) as pool:
            # map yields in submission order, so the reduction below is schedule-free
            outcomes = list(pool.map(lambda item: run_replicate(g, item[0], item[1], cfg), items))
    else:
        outcomes = [run_replicate(g, k, rep, cfg) for k, rep in items]

    # phase seconds add up across worker threads; only 'total' is wall-clock
    summed = dict.fromkeys(PHASES, 0.0)
    for outcome in outcomes:
        for phase, seconds in outcome.timing.items():
            summed[phase] += seconds
    timing = {'summed_over_threads': summed}

    per_k = {}
    for k in cfg.cluster_range:
        per_k[k] = best_replicate([o for o in outcomes if o.k == k], cfg)
        logger.info('k=%d: best mri %.4f (replicate %d)', k, per_k[k].mri, per_k[k].replicate)

    k_hat = select_cluster_size({k: diag.mri for k, diag in per_k.items()})
    chosen = per_k[k_hat]
    timing['total'] = time.perf_counter() - started
    logger.info('Selected k_hat=%d with mri %.4f in %.2fs', k_hat, chosen.mri, timing['total'])
    return EnsembleResult(
        embedding=chosen.embedding,
        labels=chosen.labels,
        k_hat=k_hat,
        mri=chosen.mri,
        per_k=per_k,
        timing=timing,
    )


def fit_single(g, k, cfg):
    return fit(g, replace(cfg, cluster_range=(k,)))
