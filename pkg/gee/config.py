"""Default settings and the typed configs for k-means and the ensemble."""
import os
from dataclasses import asdict, dataclass, field

from .errors import ConfigError

DEFAULTS = {
    'REPLICATES': 10,
    'MAX_ITERS': 20,
    'KMEANS_MAX_ITERS': 100,
    'KMEANS_TOL': 1e-6,
    'SEED': 0,
    'NORMALIZE': True,
    'TIE_MODE': 'first_min',
    'MRI_CENTROID': 'mean',
    'KMEANS_INIT': 'warm',
    'INDEX_BASE': 1,
    'DEFAULT_WEIGHT': 1.0,
    'THREADS': 1,
}

TIE_MODES = ('first_min', 'average_embedding')
CENTROID_MODES = ('mean', 'sum')
KMEANS_INITS = ('warm', 'kmeans++')


def from_mapping(mapping=None, **overrides):
    """Return DEFAULTS overlaid with `mapping` and keyword overrides.

    Keys are case-insensitive; unknown keys raise ConfigError.
    """
    settings = dict(DEFAULTS)
    settings['THREADS'] = thread_count()
    for source in (mapping or {}), overrides:
        for key, value in source.items():
            name = key.upper()
            if name not in DEFAULTS:
                raise ConfigError(f'Unknown setting: {key}')
            settings[name] = value
    return settings


def thread_count(default=None):
    fallback = DEFAULTS['THREADS'] if default is None else default
    raw = os.environ.get('GEE_THREADS')
    if raw is None or raw.strip() == '':
        return fallback
    try:
        threads = int(raw)
    except ValueError:
        raise ConfigError(f'GEE_THREADS must be an integer, got {raw!r}') from None
    if threads < 1:
        raise ConfigError(f'GEE_THREADS must be >= 1, got {threads}')
    return threads


@dataclass(frozen=True)
class KMeansConfig:
    k: int
    max_iters: int = DEFAULTS['KMEANS_MAX_ITERS']
    tol: float = DEFAULTS['KMEANS_TOL']
    seed: int = DEFAULTS['SEED']

    def __post_init__(self):
        if int(self.k) < 1:
            raise ConfigError(f'k must be >= 1, got {self.k}')
        if int(self.max_iters) < 1:
            raise ConfigError(f'max_iters must be >= 1, got {self.max_iters}')
        if not self.tol > 0:
            raise ConfigError(f'tol must be > 0, got {self.tol}')

    def to_dict(self):
        return asdict(self)


@dataclass(frozen=True)
class EnsembleConfig:
    cluster_range: tuple
    replicates: int = DEFAULTS['REPLICATES']
    max_iters: int = DEFAULTS['MAX_ITERS']
    seed: int = DEFAULTS['SEED']
    normalize: bool = DEFAULTS['NORMALIZE']
    tie_mode: str = DEFAULTS['TIE_MODE']
    mri_centroid: str = DEFAULTS['MRI_CENTROID']
    kmeans_max_iters: int = DEFAULTS['KMEANS_MAX_ITERS']
    kmeans_tol: float = DEFAULTS['KMEANS_TOL']
    kmeans_init: str = DEFAULTS['KMEANS_INIT']
    n_jobs: int = field(default_factory=thread_count)

    def __post_init__(self):
        try:
            ks = sorted({int(k) for k in self.cluster_range})
        except TypeError:
            ks = [int(self.cluster_range)]
        if not ks:
            raise ConfigError('cluster_range must contain at least one k')
        if ks[0] < 1:
            raise ConfigError(f'every k in cluster_range must be >= 1, got {ks[0]}')
        object.__setattr__(self, 'cluster_range', tuple(ks))
        if self.replicates < 1:
            raise ConfigError(f'replicates must be >= 1, got {self.replicates}')
        if self.max_iters < 1:
            raise ConfigError(f'max_iters must be >= 1, got {self.max_iters}')
        if self.tie_mode not in TIE_MODES:
            raise ConfigError(f'tie_mode must be one of {TIE_MODES}, got {self.tie_mode!r}')
        if self.mri_centroid not in CENTROID_MODES:
            raise ConfigError(f'mri_centroid must be one of {CENTROID_MODES}, got {self.mri_centroid!r}')
        if self.kmeans_init not in KMEANS_INITS:
            raise ConfigError(f'kmeans_init must be one of {KMEANS_INITS}, got {self.kmeans_init!r}')
        if self.n_jobs < 1:
            raise ConfigError(f'n_jobs must be >= 1, got {self.n_jobs}')
        # validates the k-means settings early
        KMeansConfig(k=1, max_iters=self.kmeans_max_iters, tol=self.kmeans_tol)

    @classmethod
    def from_settings(cls, cluster_range, settings=None, **overrides):
        settings = settings or from_mapping()
        values = dict(
            replicates=settings['REPLICATES'],
            max_iters=settings['MAX_ITERS'],
            seed=settings['SEED'],
            normalize=settings['NORMALIZE'],
            tie_mode=settings['TIE_MODE'],
            mri_centroid=settings['MRI_CENTROID'],
            kmeans_max_iters=settings['KMEANS_MAX_ITERS'],
            kmeans_tol=settings['KMEANS_TOL'],
            kmeans_init=settings['KMEANS_INIT'],
            n_jobs=settings['THREADS'],
        )
        values.update(overrides)
        return cls(cluster_range=cluster_range, **values)

    def kmeans_config(self, k, seed):
        return KMeansConfig(k=k, max_iters=self.kmeans_max_iters, tol=self.kmeans_tol, seed=seed)

    def to_dict(self):
        data = asdict(self)
        data['cluster_range'] = list(self.cluster_range)
        return data
