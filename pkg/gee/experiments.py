"""Monte Carlo experiment harness and the runtime benchmark.

Every replicate row carries the seed that produced it: the draw is
`preset(sim, n, seed)` and the ensemble runs with the same seed, so a single
row can be replayed on its own. Summaries are computed from the replicate
table alone.
"""
import json
import logging
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np
import pandas as pd

from . import ensemble, simgen
from .config import DEFAULTS, KMEANS_INITS, EnsembleConfig, thread_count
from .errors import ExperimentError, QualityError
from .graph import class_counts
from .quality import ari, silhouette

logger = logging.getLogger(__name__)

EXPERIMENTS = ('table1', 'table2', 'fig1')
FIG1_SIZES = (1000, 2000, 3000, 4000, 5000)
FIG1_RANGE = tuple(range(2, 11))
CURVE_SIMULATION = 'sim3'
CURVE_N = 5000
LOW_POWER_REPS = 10
BENCH_EDGES = (10 ** 4, 10 ** 5, 10 ** 6)
BENCH_AVG_DEGREE = 20

# (method label, normalize, replicates)
METHODS = {
    'table1': (('GEE', True, 1), ('GEE no norm', False, 1)),
    'table2': (('GEE', True, DEFAULTS['REPLICATES']), ('GEE r=1', True, 1)),
    'fig1': (('GEE', True, DEFAULTS['REPLICATES']),),
}


def derive_seed(master, counter):
    return int(np.random.SeedSequence([master, counter]).generate_state(1)[0])


@dataclass(frozen=True)
class ExperimentConfig:
    experiment: str
    mc_reps: int = 100
    seed: int = DEFAULTS['SEED']
    n: int = None
    simulations: tuple = simgen.PRESETS
    sizes: tuple = FIG1_SIZES
    cluster_range: tuple = FIG1_RANGE
    curve_n: int = CURVE_N
    max_iters: int = DEFAULTS['MAX_ITERS']
    kmeans_init: str = 'kmeans++'
    n_jobs: int = field(default_factory=thread_count)

    def __post_init__(self):
        if self.experiment not in EXPERIMENTS:
            raise ExperimentError(f'Unknown experiment {self.experiment!r}; choose from {", ".join(EXPERIMENTS)}')
        if int(self.mc_reps) < 1:
            raise ExperimentError(f'mc_reps must be >= 1, got {self.mc_reps}')
        for name in self.simulations:
            if name not in simgen.PRESETS:
                raise ExperimentError(f'Unknown simulation {name!r}')
        if self.n is not None:
            # a single graph size replaces the sweep and the curve size
            object.__setattr__(self, 'sizes', (int(self.n),))
            object.__setattr__(self, 'curve_n', int(self.n))
        object.__setattr__(self, 'simulations', tuple(self.simulations))
        object.__setattr__(self, 'sizes', tuple(int(s) for s in self.sizes))
        object.__setattr__(self, 'cluster_range', tuple(self.cluster_range))
        if self.kmeans_init not in KMEANS_INITS:
            raise ExperimentError(f'kmeans_init must be one of {KMEANS_INITS}, got {self.kmeans_init!r}')
        if self.experiment == 'fig1' and min(self.sizes) < max(self.cluster_range):
            raise ExperimentError(f'graph size {min(self.sizes)} is below '
                                  f'the largest candidate k={max(self.cluster_range)}')

    def graph_sizes(self):
        if self.experiment == 'fig1':
            return self.sizes
        return (simgen.PRESET_N if self.n is None else int(self.n),)

    def to_dict(self):
        data = asdict(self)
        data['methods'] = [list(m) for m in METHODS[self.experiment]]
        return data


@dataclass(frozen=True)
class Task:
    simulation: str
    n: int
    mc_rep: int
    seed: int


def plan(cfg):
    tasks = []
    for simulation in cfg.simulations:
        for n in cfg.graph_sizes():
            for rep in range(cfg.mc_reps):
                tasks.append(Task(simulation, n, rep, derive_seed(cfg.seed, len(tasks))))
    return tasks


def _curve_rows(task, result):
    rows = []
    for k, diag in result.per_k.items():
        try:
            score = silhouette(diag.embedding, diag.labels)
        except QualityError:
            score = float('nan')
        rows.append({
            'simulation': task.simulation, 'n': task.n, 'mc_rep': task.mc_rep, 'seed': task.seed,
            'k': k, 'mri': diag.mri, 'silhouette': score,
        })
    return rows


def run_task(task, cfg):
    """All methods of one experiment on one simulated graph."""
    draw = simgen.sample(simgen.preset(task.simulation, n=task.n, seed=task.seed))
    truth_k = draw.truth.k
    counts = ';'.join(str(c) for c in class_counts(draw.truth))
    rows, curves = [], []
    for method, normalize, replicates in METHODS[cfg.experiment]:
        cluster_range = cfg.cluster_range if cfg.experiment == 'fig1' else (truth_k,)
        ecfg = EnsembleConfig(cluster_range=cluster_range, replicates=replicates, max_iters=cfg.max_iters,
                              seed=task.seed, normalize=normalize,
                              kmeans_init=cfg.kmeans_init, n_jobs=1)
        result = ensemble.fit(draw.graph, ecfg)
        row = {
            'experiment': cfg.experiment,
            'simulation': task.simulation,
            'n': task.n,
            'mc_rep': task.mc_rep,
            'seed': task.seed,
            'method': method,
            'normalize': normalize,
            'replicates': replicates,
            'true_k': truth_k,
            'k_hat': result.k_hat,
            'correct': result.k_hat == truth_k,
            'ari': ari(result.labels, draw.truth),
            'mri': result.mri,
            'n_edges': draw.graph.n_edges,
            'class_counts': counts,
        }
        if cfg.experiment == 'fig1' and task.simulation == CURVE_SIMULATION and task.n == cfg.curve_n:
            task_curves = _curve_rows(task, result)
            scored = [c for c in task_curves if not math.isnan(c['silhouette'])]
            # highest silhouette wins, ties to the smaller k
            row['k_hat_ss'] = max(scored, key=lambda c: (c['silhouette'], -c['k']))['k'] if scored else None
            curves.extend(task_curves)
        rows.append(row)
    return rows, curves


def run_experiment(cfg, progress=None):
    """Run every Monte Carlo task; returns (replicates frame, curves frame)."""
    tasks = plan(cfg)
    logger.info('Running %s: %d tasks on %d thread(s)', cfg.experiment, len(tasks), cfg.n_jobs)

    def work(task):
        outcome = run_task(task, cfg)
        if progress is not None:
            progress(task)
        return outcome

    if cfg.n_jobs > 1:
        with ThreadPoolExecutor(max_workers=cfg.n_jobs) as pool:
            outcomes = list(pool.map(work, tasks))
    else:
        outcomes = [work(task) for task in tasks]

    rows = [row for task_rows, _ in outcomes for row in task_rows]
    curves = [row for _, task_curves in outcomes for row in task_curves]
    return pd.DataFrame(rows), pd.DataFrame(curves)


def summarize(frame):
    """Mean and standard deviation per (simulation, n, method) from replicate rows."""
    keys = ['experiment', 'simulation', 'n', 'method']
    grouped = frame.groupby(keys, sort=False)
    summary = grouped.agg(
        reps=('ari', 'size'),
        ari_mean=('ari', 'mean'),
        ari_std=('ari', 'std'),
        mri_mean=('mri', 'mean'),
        accuracy=('correct', 'mean'),
    ).reset_index()
    if 'k_hat_ss' in frame.columns:
        ss = frame.dropna(subset=['k_hat_ss']).copy()
        if not ss.empty:
            ss['ss_correct'] = ss['k_hat_ss'] == ss['true_k']
            ss_summary = ss.groupby(keys, sort=False).agg(
                ss_accuracy=('ss_correct', 'mean'),
                k_hat_ss_mode=('k_hat_ss', lambda s: int(s.mode().min())),
                k_hat_mode=('k_hat', lambda s: int(s.mode().min())),
            ).reset_index()
            summary = summary.merge(ss_summary, on=keys, how='left')
    summary['low_power'] = summary['reps'] < LOW_POWER_REPS
    return summary


def summarize_curves(curves):
    if curves.empty:
        return curves
    return curves.groupby(['simulation', 'n', 'k'], sort=True).agg(
        mri_mean=('mri', 'mean'),
        silhouette_mean=('silhouette', 'mean'),
        reps=('mri', 'size'),
    ).reset_index()


def render(summary):
    shown = summary.copy()
    shown['ari'] = [f'{m:.2f} ± {s:.2f}' if not math.isnan(s) else f'{m:.2f}'
                    for m, s in zip(shown['ari_mean'], shown['ari_std'])]
    columns = ['simulation', 'n', 'method', 'reps', 'ari', 'accuracy']
    columns += [c for c in ('ss_accuracy', 'k_hat_mode', 'k_hat_ss_mode') if c in shown.columns]
    columns.append('low_power')
    return shown[columns].to_string(index=False) + '\n'


def write_table(frame, path, config):
    """CSV preceded by a `# config:` line holding everything needed to regenerate it."""
    with open(path, 'w', encoding='utf-8', newline='') as fh:
        fh.write('# config: ' + json.dumps(config, sort_keys=True) + '\n')
        frame.to_csv(fh, index=False, lineterminator='\n')


def write_text(text, path, config):
    with open(path, 'w', encoding='utf-8', newline='') as fh:
        fh.write('# config: ' + json.dumps(config, sort_keys=True) + '\n')
        fh.write(text)


def read_table(path):
    return pd.read_csv(path, comment='#')


def bench_graph(n_edges, seed, min_vertices=10):
    n = max(n_edges * 2 // BENCH_AVG_DEGREE, min_vertices)
    return simgen.sample_planted(n, n_edges, k=3, seed=seed).graph


def run_bench(edge_counts=BENCH_EDGES, cluster_range=FIG1_RANGE, replicates=DEFAULTS['REPLICATES'],
              max_iters=DEFAULTS['MAX_ITERS'], seed=DEFAULTS['SEED'], n_jobs=None, progress=None):
    """Time `ensemble.fit` over synthetic graphs of increasing edge count."""
    counts = sorted(int(s) for s in edge_counts)
    if not counts:
        raise ExperimentError('bench sweep needs at least one edge count')
    if counts[0] < 1:
        raise ExperimentError(f'edge counts must be positive, got {counts[0]}')
    cfg = EnsembleConfig(cluster_range=cluster_range, replicates=replicates, max_iters=max_iters, seed=seed,
                         **({} if n_jobs is None else {'n_jobs': n_jobs}))
    rows = []
    for s in counts:
        graph = bench_graph(s, seed, min_vertices=2 * max(cfg.cluster_range))
        start = time.perf_counter()
        result = ensemble.fit(graph, cfg)
        elapsed = time.perf_counter() - start
        rows.append({'s': s, 'n': graph.n_vertices, 'wall_time': elapsed,
                     'k_hat': result.k_hat, 'mri': result.mri})
        logger.info('bench s=%d n=%d: %.2fs', s, graph.n_vertices, elapsed)
        if progress is not None:
            progress(rows[-1])
    return pd.DataFrame(rows)


def growth_per_decade(bench):
    """Wall-time growth factor per 10x edges between consecutive sweep points."""
    ratios = []
    for (s1, t1), (s2, t2) in zip(bench[['s', 'wall_time']].values[:-1], bench[['s', 'wall_time']].values[1:]):
        decades = math.log10(s2 / s1)
        ratios.append((t2 / t1) ** (1.0 / decades) if decades > 0 and t1 > 0 else float('nan'))
    return ratios
