import numpy as np
import pandas as pd
import pytest

from gee import experiments
from gee.errors import ExperimentError
from gee.experiments import ExperimentConfig


def frame(**columns):
    size = len(next(iter(columns.values())))
    base = {'experiment': ['table2'] * size, 'simulation': ['sim1'] * size, 'n': [3000] * size,
            'method': ['GEE'] * size}
    base.update(columns)
    return pd.DataFrame(base)


def test_derived_seeds_are_stable_and_distinct():
    seeds = [experiments.derive_seed(3, counter) for counter in range(50)]
    assert seeds == [experiments.derive_seed(3, counter) for counter in range(50)]
    assert len(set(seeds)) == 50
    assert seeds[0] != experiments.derive_seed(4, 0)


@pytest.mark.parametrize('kwargs', [
    {'experiment': 'table3'},
    {'experiment': 'table1', 'mc_reps': 0},
    {'experiment': 'fig1', 'simulations': ('sim1', 'sim5')},
    {'experiment': 'fig1', 'n': 8},
    {'experiment': 'fig1', 'sizes': (500, 6), 'cluster_range': (2, 3, 7)},
    {'experiment': 'table2', 'kmeans_init': 'random'},
])
def test_invalid_experiment_config(kwargs):
    with pytest.raises(ExperimentError):
        ExperimentConfig(**kwargs)


def test_graph_sizes():
    assert ExperimentConfig('table1').graph_sizes() == (3000,)
    assert ExperimentConfig('table1', n=400).graph_sizes() == (400,)
    assert ExperimentConfig('fig1').graph_sizes() == experiments.FIG1_SIZES
    narrowed = ExperimentConfig('fig1', n=800)
    assert narrowed.graph_sizes() == (800,)
    assert narrowed.curve_n == 800


def test_plan_covers_every_draw():
    cfg = ExperimentConfig('fig1', mc_reps=3, simulations=('sim1', 'sim3'), sizes=(100, 200))
    tasks = experiments.plan(cfg)
    assert len(tasks) == 2 * 2 * 3
    assert len({task.seed for task in tasks}) == len(tasks)
    assert tasks == experiments.plan(cfg)


def test_config_records_methods():
    data = ExperimentConfig('table2', n=500).to_dict()
    assert data['methods'] == [['GEE', True, 10], ['GEE r=1', True, 1]]
    assert data['sizes'] == (500,)
    assert data['kmeans_init'] == 'kmeans++'


def test_table1_task_rows():
    cfg = ExperimentConfig('table1', mc_reps=1, n=200, simulations=('sim1',), n_jobs=1)
    task = experiments.plan(cfg)[0]
    rows, curves = experiments.run_task(task, cfg)
    assert curves == []
    assert [row['method'] for row in rows] == ['GEE', 'GEE no norm']
    assert [row['normalize'] for row in rows] == [True, False]
    for row in rows:
        assert row['true_k'] == 2 and row['k_hat'] == 2
        assert row['seed'] == task.seed
        assert -1.0 <= row['ari'] <= 1.0
        assert sum(int(c) for c in row['class_counts'].split(';')) == 200


def test_fig1_task_scores_every_candidate():
    cfg = ExperimentConfig('fig1', mc_reps=1, n=400, simulations=('sim3',), cluster_range=(2, 3, 4, 5, 6),
                           n_jobs=1)
    rows, curves = experiments.run_task(experiments.plan(cfg)[0], cfg)
    assert [c['k'] for c in curves] == [2, 3, 4, 5, 6]
    assert rows[0]['k_hat'] in (2, 3, 4, 5, 6)
    assert rows[0]['k_hat_ss'] in (2, 3, 4, 5, 6)
    assert all(-1.0 <= c['silhouette'] <= 1.0 for c in curves)


def test_threads_do_not_change_the_replicate_table():
    serial = ExperimentConfig('table1', mc_reps=2, n=150, simulations=('sim1',), n_jobs=1)
    threaded = ExperimentConfig('table1', mc_reps=2, n=150, simulations=('sim1',), n_jobs=3)
    seen = []
    rows_serial, _ = experiments.run_experiment(serial, progress=seen.append)
    rows_threaded, _ = experiments.run_experiment(threaded)
    pd.testing.assert_frame_equal(rows_serial, rows_threaded)
    assert len(seen) == 2
    assert len(rows_serial) == 4


def test_summarize_means_and_spread():
    summary = experiments.summarize(frame(ari=[0.9, 0.8], mri=[0.0, 0.1], correct=[True, False]))
    row = summary.iloc[0]
    assert row['reps'] == 2
    assert row['ari_mean'] == pytest.approx(0.85)
    assert row['ari_std'] == pytest.approx(np.std([0.9, 0.8], ddof=1))
    assert row['mri_mean'] == pytest.approx(0.05)
    assert row['accuracy'] == 0.5
    assert row['low_power']


def test_summarize_size_selection_columns():
    summary = experiments.summarize(frame(
        ari=[0.5, 0.6, 0.7], mri=[0.0] * 3, correct=[True, True, False],
        true_k=[5, 5, 5], k_hat=[5, 5, 4], k_hat_ss=[2, 2, 5]))
    row = summary.iloc[0]
    assert row['ss_accuracy'] == pytest.approx(1 / 3)
    assert row['k_hat_ss_mode'] == 2
    assert row['k_hat_mode'] == 5


def test_enough_replicates_are_not_low_power():
    summary = experiments.summarize(frame(ari=[1.0] * 10, mri=[0.0] * 10, correct=[True] * 10))
    assert not summary['low_power'].any()


def test_summary_recomputes_from_written_table(tmp_path):
    rows = frame(ari=[0.9, 0.8, 0.95], mri=[0.0, 0.1, 0.0], correct=[True, False, True])
    path = str(tmp_path / 'rows.csv')
    experiments.write_table(rows, path, {'experiment': 'table2', 'seed': 0})
    with open(path, encoding='utf-8') as fh:
        assert fh.readline() == '# config: {"experiment": "table2", "seed": 0}\n'
    pd.testing.assert_frame_equal(experiments.summarize(experiments.read_table(path)),
                                  experiments.summarize(rows), check_dtype=False)


def test_render_shows_mean_and_spread():
    text = experiments.render(experiments.summarize(frame(ari=[0.9, 0.8], mri=[0.0, 0.0], correct=[True, True])))
    assert '0.85 ± 0.07' in text
    assert 'low_power' in text


def test_curve_summary():
    curves = pd.DataFrame({'simulation': ['sim3'] * 4, 'n': [500] * 4, 'k': [2, 3, 2, 3],
                           'mri': [0.1, 0.0, 0.3, 0.0], 'silhouette': [0.5, 0.2, 0.3, 0.4]})
    summary = experiments.summarize_curves(curves)
    assert summary['k'].tolist() == [2, 3]
    assert summary['mri_mean'].tolist() == pytest.approx([0.2, 0.0])
    assert summary['silhouette_mean'].tolist() == pytest.approx([0.4, 0.3])


def test_growth_per_decade():
    bench = pd.DataFrame({'s': [10 ** 4, 10 ** 5, 10 ** 6], 'wall_time': [1.0, 10.0, 100.0]})
    assert experiments.growth_per_decade(bench) == pytest.approx([10.0, 10.0])


def test_bench_rows():
    bench = experiments.run_bench((1000, 3000), cluster_range=(2, 3), replicates=1, max_iters=3, n_jobs=1)
    assert bench['s'].tolist() == [1000, 3000]
    assert bench['n'].tolist() == [100, 300]
    assert set(bench.columns) == {'s', 'n', 'wall_time', 'k_hat', 'mri'}


@pytest.mark.parametrize('counts', [(), (0, 100)])
def test_bench_validation(counts):
    with pytest.raises(ExperimentError):
        experiments.run_bench(counts)
