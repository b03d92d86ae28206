"""Stochastic block model generators and the three simulation presets."""
import logging
from dataclasses import asdict, dataclass, field

import numpy as np

from .errors import SimulationError
from .graph import write_edgelist, write_labels
from .models import EdgeList, LabelVector

logger = logging.getLogger(__name__)

PRESETS = ('sim1', 'sim2', 'sim3')
PRESET_N = 3000


@dataclass(frozen=True)
class ThetaDistribution:
    """Beta(alpha, beta) degree parameters."""
    alpha: float = 1.0
    beta: float = 4.0

    def __post_init__(self):
        if not (self.alpha > 0 and self.beta > 0):
            raise SimulationError(f'Beta shape parameters must be positive, got ({self.alpha}, {self.beta})')

    @property
    def mean(self):
        return self.alpha / (self.alpha + self.beta)

    def sample(self, rng, size):
        if self.alpha == 1.0:
            # inverse CDF of Beta(1, b): 1 - (1 - u) ** (1 / b)
            return 1.0 - (1.0 - rng.random(size)) ** (1.0 / self.beta)
        if self.beta == 1.0:
            return rng.random(size) ** (1.0 / self.alpha)
        return rng.beta(self.alpha, self.beta, size)


@dataclass(frozen=True, eq=False)
class SimSpec:
    """Parameters of one (degree-corrected) SBM draw.

    Either `priors` (labels drawn i.i.d.) or `labels` (fixed, 1-based) sets
    the communities.
    """
    n: int
    B: np.ndarray
    priors: np.ndarray = None
    labels: np.ndarray = None
    degree_corrected: bool = True
    theta_dist: ThetaDistribution = field(default_factory=ThetaDistribution)
    seed: int = 0

    def __post_init__(self):
        B = np.array(self.B, dtype=np.float64)
        if B.ndim != 2 or B.shape[0] != B.shape[1] or B.shape[0] < 1:
            raise SimulationError(f'B must be a nonempty square matrix, got shape {B.shape}')
        if not np.all((B >= 0) & (B <= 1)):
            raise SimulationError('B entries must lie in [0, 1]')
        if not np.allclose(B, B.T):
            raise SimulationError('B must be symmetric for undirected generation')
        if int(self.n) < 1:
            raise SimulationError(f'n must be >= 1, got {self.n}')
        K = B.shape[0]
        if self.labels is not None:
            labels = np.asarray(self.labels, dtype=np.int64)
            if labels.shape != (int(self.n),) or labels.min() < 1 or labels.max() > K:
                raise SimulationError(f'fixed labels must be {self.n} values in [1, {K}]')
            object.__setattr__(self, 'labels', labels)
            priors = None
        else:
            priors = np.full(K, 1.0 / K) if self.priors is None else np.array(self.priors, dtype=np.float64)
            if priors.shape != (K,) or np.any(priors < 0) or not np.isclose(priors.sum(), 1.0):
                raise SimulationError(f'priors must be {K} nonnegative values summing to 1')
        object.__setattr__(self, 'B', B)
        object.__setattr__(self, 'priors', priors)
        object.__setattr__(self, 'n', int(self.n))

    @property
    def k(self):
        return self.B.shape[0]

    def to_dict(self):
        return {
            'n': self.n,
            'B': self.B.tolist(),
            'priors': None if self.priors is None else self.priors.tolist(),
            'fixed_labels': self.labels is not None,
            'degree_corrected': self.degree_corrected,
            'theta_dist': asdict(self.theta_dist),
            'seed': self.seed,
        }


@dataclass(frozen=True, eq=False)
class SimDraw:
    graph: EdgeList
    truth: LabelVector
    thetas: np.ndarray


def preset(name, n=None, seed=0):
    """One of the three benchmark settings, all degree-corrected with Beta(1, 4)."""
    size = PRESET_N if n is None else n
    if name == 'sim1':
        B = [[0.5, 0.1], [0.1, 0.5]]
        priors = [0.5, 0.5]
    elif name == 'sim2':
        B = np.full((4, 4), 0.1)
        np.fill_diagonal(B, [0.9, 0.7, 0.5, 0.3])
        priors = [0.2, 0.2, 0.3, 0.3]
    elif name == 'sim3':
        B = np.full((5, 5), 0.1)
        np.fill_diagonal(B, 0.2)
        priors = np.full(5, 0.2)
    else:
        raise SimulationError(f'Unknown preset {name!r}; choose from {", ".join(PRESETS)}')
    return SimSpec(n=size, B=B, priors=priors, degree_corrected=True,
                   theta_dist=ThetaDistribution(1.0, 4.0), seed=seed)


def sample(spec):
    """Draw one undirected binary graph and its ground-truth labels.

    Every pair i < j is an edge independently with probability
    theta_i * theta_j * B(Y_i, Y_j) (theta = 1 without degree correction).
    """
    rng = np.random.default_rng(spec.seed)
    n = spec.n
    if spec.labels is not None:
        labels = spec.labels
    else:
        labels = rng.choice(spec.k, size=n, p=spec.priors) + 1
    if spec.degree_corrected:
        thetas = spec.theta_dist.sample(rng, n)
    else:
        thetas = np.ones(n)

    col = labels - 1
    sources, targets = [], []
    for i in range(n - 1):
        j = np.arange(i + 1, n)
        p = thetas[i] * thetas[j] * spec.B[col[i], col[j]]
        if np.any(p > 1.0):
            raise SimulationError(f'edge probability above 1 for vertex {i}: {p.max()}')
        hits = j[rng.random(n - i - 1) < p]
        if hits.size:
            sources.append(np.full(hits.size, i))
            targets.append(hits)

    if sources:
        sources, targets = np.concatenate(sources), np.concatenate(targets)
    else:
        sources, targets = np.empty(0, dtype=np.int64), np.empty(0, dtype=np.int64)
    graph = EdgeList(n, sources, targets, np.ones(len(sources)), directed=False)
    logger.debug('Sampled %d vertices, %d edges (seed=%s)', n, graph.n_edges, spec.seed)
    return SimDraw(
        graph=graph,
        truth=LabelVector(labels, spec.k),
        thetas=thetas if spec.degree_corrected else np.empty(0),
    )


def sample_planted(n, n_edges, k=3, p_in=0.8, seed=0):
    """Planted-partition multigraph with exactly `n_edges` edges, in O(n + s).

    Each edge picks a uniform source; with probability `p_in` its target is
    drawn from the source's own block, otherwise uniformly. Self-loops are
    redrawn.
    """
    if n < 2 or n_edges < 0 or not 1 <= k <= n or not 0 <= p_in <= 1:
        raise SimulationError(f'invalid planted-partition settings n={n}, s={n_edges}, k={k}, p_in={p_in}')
    rng = np.random.default_rng(seed)
    labels = np.arange(n) % k
    rng.shuffle(labels)
    members = [np.flatnonzero(labels == block) for block in range(k)]

    sources = rng.integers(0, n, size=n_edges)
    targets = rng.integers(0, n, size=n_edges)
    inside = rng.random(n_edges) < p_in
    for block in range(k):
        pick = inside & (labels[sources] == block)
        if len(members[block]) > 1:
            targets[pick] = members[block][rng.integers(0, len(members[block]), size=pick.sum())]
    loops = sources == targets
    while loops.any():
        targets[loops] = rng.integers(0, n, size=loops.sum())
        loops = sources == targets

    graph = EdgeList(n, sources, targets, np.ones(n_edges), directed=False)
    return SimDraw(graph=graph, truth=LabelVector(labels + 1, k), thetas=np.empty(0))


def write_draw(draw, edges_path, labels_path, index_base=1):
    write_edgelist(draw.graph, edges_path, index_base=index_base)
    write_labels(draw.truth, labels_path, format='csv', index_base=index_base)

