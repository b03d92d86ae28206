import json
import logging
import os
import re
import sys
import threading
from logging.config import fileConfig

import click

from gee import config as settings
from gee import encoder, ensemble, experiments, simgen
from gee.config import EnsembleConfig
from gee.errors import ConfigError, EnsembleError, ExperimentError, GraphFormatError, GraphValidationError, \
    LabelError, SimulationError
from gee.graph import FORMATS, parse_edgelist, read_labels, write_embedding, write_labels

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2

LOGGING_INI = os.path.join(os.path.dirname(os.path.abspath(__file__)), 'logging.ini')

logger = logging.getLogger('gee.cli')


class DataError(click.ClickException):
    exit_code = EXIT_DATA


class ExitCodeGroup(click.Group):
    """Maps outcomes onto 0 success, 1 usage error, 2 data error."""

    def main(self, args=None, prog_name=None, complete_var=None, standalone_mode=True, **extra):
        try:
            rv = super().main(args=args, prog_name=prog_name, complete_var=complete_var,
                              standalone_mode=False, **extra)
        except click.UsageError as exc:
            exc.show()
            code = EXIT_USAGE
        except click.ClickException as exc:
            exc.show()
            code = exc.exit_code
        except click.Abort:
            click.echo('Aborted!', err=True)
            code = EXIT_USAGE
        else:
            code = rv if isinstance(rv, int) else EXIT_OK
        if standalone_mode:
            sys.exit(code)
        return code


def parse_k_range(text):
    """'2..6' -> (2, 3, 4, 5, 6); '2,4,8' -> (2, 4, 8); '3' -> (3,)."""
    text = str(text).strip()
    match = re.fullmatch(r'(\d+)\s*\.\.\s*(\d+)', text)
    try:
        if match:
            low, high = int(match.group(1)), int(match.group(2))
            if low > high:
                raise ValueError
            return tuple(range(low, high + 1))
        values = tuple(int(part) for part in re.split(r'[,\s]+', text) if part)
    except ValueError:
        raise click.BadParameter(f'expected a range like 2..6 or a list like 2,3,4, got {text!r}') from None
    if not values:
        raise click.BadParameter('no cluster sizes given')
    return values


def parse_counts(text):
    try:
        return [int(float(part)) for part in re.split(r'[,\s]+', str(text).strip()) if part]
    except ValueError:
        raise click.BadParameter(f'expected comma-separated edge counts, got {text!r}') from None


def default_output(input_path, suffix):
    stem, _ = os.path.splitext(input_path)
    return f'{stem}_{suffix}'


def configure_logging(verbose=False):
    if os.path.exists(LOGGING_INI):
        fileConfig(LOGGING_INI, disable_existing_loggers=False)
    else:
        logging.basicConfig(level=logging.WARNING)
    if verbose:
        for name in ('gee', 'gee.ensemble'):
            logging.getLogger(name).setLevel(logging.DEBUG)


def create_cli():
    @click.group(cls=ExitCodeGroup)
    @click.option('-v', '--verbose', is_flag=True, help='Log per-iteration detail.')
    def cli(verbose):
        """Graph encoder ensemble: embedding, community detection and cluster-size estimation."""
        configure_logging(verbose)

    cli.add_command(cluster_command)
    cli.add_command(embed_command)
    cli.add_command(simulate_command)
    cli.add_command(experiment_command)
    cli.add_command(bench_command)
    return cli


def graph_options(command):
    command = click.option('--directed/--undirected', default=False, help='Edge semantics of the input.')(command)
    command = click.option('--index-base', type=click.IntRange(0, 1), default=settings.DEFAULTS['INDEX_BASE'],
                           show_default=True, help='First vertex id in the files.')(command)
    command = click.option('--delimiter', default=None, help='Field delimiter (default: whitespace or comma).')(command)
    command = click.option('--n-vertices', type=click.IntRange(min=1), default=None,
                           help='Vertex count, for trailing isolated vertices.')(command)
    command = click.option('--default-weight', type=float, default=settings.DEFAULTS['DEFAULT_WEIGHT'],
                           show_default=True, help='Weight of two-column lines.')(command)
    return command


def load_graph(input_path, directed, index_base, delimiter, n_vertices, default_weight):
    try:
        return parse_edgelist(input_path, delimiter=delimiter, index_base=index_base, directed=directed,
                              default_weight=default_weight, n_vertices=n_vertices)
    except FileNotFoundError:
        raise click.UsageError(f"The file '{input_path}' was not found.") from None
    except (GraphFormatError, GraphValidationError) as exc:
        raise DataError(str(exc)) from exc


@click.command('cluster')
@click.argument('input_path', type=click.Path(exists=True, dir_okay=False))
@click.option('--k-range', default='2..10', show_default=True, help='Candidate cluster sizes, e.g. 2..10 or 2,4,6.')
@click.option('--k', 'fixed_k', type=click.IntRange(min=1), default=None, help='Known cluster size; overrides --k-range.')
@click.option('-r', '--replicates', type=click.IntRange(min=1), default=settings.DEFAULTS['REPLICATES'], show_default=True)
@click.option('-m', '--max-iters', type=click.IntRange(min=1), default=settings.DEFAULTS['MAX_ITERS'], show_default=True)
@click.option('--seed', type=int, default=settings.DEFAULTS['SEED'], show_default=True)
@click.option('--no-normalize', is_flag=True, help='Skip L2 row normalization.')
@click.option('--tie-mode', type=click.Choice(settings.TIE_MODES), default=settings.DEFAULTS['TIE_MODE'], show_default=True)
@click.option('--mri-centroid', type=click.Choice(settings.CENTROID_MODES), default=settings.DEFAULTS['MRI_CENTROID'],
              show_default=True)
@click.option('--kmeans-init', type=click.Choice(settings.KMEANS_INITS), default=settings.DEFAULTS['KMEANS_INIT'],
              show_default=True, help='Start each k-means step from the current labels or from k-means++.')
@click.option('--threads', type=click.IntRange(min=1), default=None, help='Worker threads (default: GEE_THREADS or 1).')
@graph_options
@click.option('--labels-out', default=None, help='Labels file (default: <input>_labels.<format>).')
@click.option('--embedding-out', default=None, help='Embedding file (default: <input>_embedding.<format>).')
@click.option('--summary-out', default=None, help='JSON summary (default: <input>_summary.json).')
@click.option('--format', 'fmt', type=click.Choice(FORMATS), default='csv', show_default=True)
def cluster_command(input_path, k_range, fixed_k, replicates, max_iters, seed, no_normalize, tie_mode, mri_centroid,
                    kmeans_init, threads, directed, index_base, delimiter, n_vertices, default_weight, labels_out,
                    embedding_out, summary_out, fmt):
    """Embed and cluster an edge-list file, estimating the cluster size."""
    cluster_range = (fixed_k,) if fixed_k is not None else parse_k_range(k_range)
    try:
        cfg = EnsembleConfig.from_settings(
            cluster_range, settings.from_mapping(threads=threads or settings.thread_count()),
            replicates=replicates, max_iters=max_iters, seed=seed, normalize=not no_normalize,
            tie_mode=tie_mode, mri_centroid=mri_centroid, kmeans_init=kmeans_init)
    except ConfigError as exc:
        raise click.UsageError(str(exc)) from exc

    graph = load_graph(input_path, directed, index_base, delimiter, n_vertices, default_weight)
    click.echo(f'Loaded {graph.n_vertices} vertices and {graph.n_edges} edges from {input_path}.')
    logger.info('Ensemble settings: %s', cfg.to_dict())
    try:
        result = ensemble.fit(graph, cfg)
    except EnsembleError as exc:
        raise DataError(str(exc)) from exc

    labels_out = labels_out or default_output(input_path, f'labels.{fmt}')
    embedding_out = embedding_out or default_output(input_path, f'embedding.{fmt}')
    summary_out = summary_out or default_output(input_path, 'summary.json')
    write_labels(result.labels, labels_out, format=fmt, index_base=index_base)
    write_embedding(result.embedding, embedding_out, format=fmt)
    summary = result.summary()
    summary['input'] = input_path
    summary['config'] = cfg.to_dict()
    with open(summary_out, 'w', encoding='utf-8') as fh:
        json.dump(summary, fh, indent=2, sort_keys=True)
        fh.write('\n')

    click.echo(f'Selected k_hat={result.k_hat} with minimal rank index {result.mri:.4f}.')
    click.echo(f'Wrote {labels_out}, {embedding_out} and {summary_out}.')
    return EXIT_OK


@click.command('embed')
@click.argument('input_path', type=click.Path(exists=True, dir_okay=False))
@click.argument('labels_path', type=click.Path(exists=True, dir_okay=False))
@click.option('--no-normalize', is_flag=True, help='Skip L2 row normalization.')
@graph_options
@click.option('--embedding-out', default=None, help='Embedding file (default: <input>_embedding.<format>).')
@click.option('--format', 'fmt', type=click.Choice(FORMATS), default='csv', show_default=True)
def embed_command(input_path, labels_path, no_normalize, directed, index_base, delimiter, n_vertices,
                  default_weight, embedding_out, fmt):
    """Encoder embedding of an edge list under known labels."""
    graph = load_graph(input_path, directed, index_base, delimiter, n_vertices, default_weight)
    try:
        labels = read_labels(labels_path, index_base=index_base, n_vertices=graph.n_vertices)
        z = encoder.one_hot_embed(graph, labels)
    except (GraphFormatError, LabelError) as exc:
        raise DataError(str(exc)) from exc
    if not no_normalize:
        z = encoder.normalize(z)
    embedding_out = embedding_out or default_output(input_path, f'embedding.{fmt}')
    write_embedding(z, embedding_out, format=fmt)
    click.echo(f'Wrote {z.n_vertices} x {z.k} embedding to {embedding_out}.')
    return EXIT_OK


@click.command('simulate')
@click.option('--preset', 'preset_name', required=True, help=f'One of {", ".join(simgen.PRESETS)}.')
@click.option('--n', type=click.IntRange(min=2), default=None, help='Vertex count override.')
@click.option('--seed', type=int, default=settings.DEFAULTS['SEED'], show_default=True)
@click.option('--index-base', type=click.IntRange(0, 1), default=settings.DEFAULTS['INDEX_BASE'], show_default=True)
@click.option('--edges-out', default=None, help='Edge-list file (default: <preset>_seed<seed>.edges).')
@click.option('--labels-out', default=None, help='Truth labels (default: <preset>_seed<seed>_truth.csv).')
def simulate_command(preset_name, n, seed, index_base, edges_out, labels_out):
    """Draw a simulation preset to an edge list plus truth labels."""
    try:
        spec = simgen.preset(preset_name, n=n, seed=seed)
    except SimulationError as exc:
        raise click.UsageError(str(exc)) from exc
    draw = simgen.sample(spec)
    edges_out = edges_out or f'{preset_name}_seed{seed}.edges'
    labels_out = labels_out or f'{preset_name}_seed{seed}_truth.csv'
    simgen.write_draw(draw, edges_out, labels_out, index_base=index_base)
    click.echo(f'Sampled {preset_name}: {draw.graph.n_vertices} vertices, {draw.graph.n_edges} edges.')
    click.echo(f'Wrote {edges_out} and {labels_out}.')
    return EXIT_OK


def progress_printer(total, every=10):
    lock = threading.Lock()
    done = [0]

    def report(_):
        with lock:
            done[0] += 1
            if done[0] % every == 0 or done[0] == total:
                click.echo(f'  Processed {done[0]}/{total} replicates...')
    return report


@click.command('experiment')
@click.argument('name', type=click.Choice(experiments.EXPERIMENTS))
@click.option('--mc-reps', type=click.IntRange(min=1), default=100, show_default=True, help='Monte Carlo draws.')
@click.option('--n', type=click.IntRange(min=2), default=None, help='Graph size override (fig1: replaces the sweep).')
@click.option('--sizes', default=','.join(str(s) for s in experiments.FIG1_SIZES), show_default=True,
              help='fig1 graph-size sweep.')
@click.option('--simulations', default=','.join(simgen.PRESETS), show_default=True)
@click.option('-m', '--max-iters', type=click.IntRange(min=1), default=settings.DEFAULTS['MAX_ITERS'], show_default=True)
@click.option('--seed', type=int, default=settings.DEFAULTS['SEED'], show_default=True, help='Master seed.')
@click.option('--kmeans-init', type=click.Choice(settings.KMEANS_INITS), default='kmeans++', show_default=True)
@click.option('--threads', type=click.IntRange(min=1), default=None, help='Worker threads (default: GEE_THREADS or 1).')
@click.option('--output-dir', type=click.Path(file_okay=False), default='results', show_default=True)
def experiment_command(name, mc_reps, n, sizes, simulations, max_iters, seed, kmeans_init, threads, output_dir):
    """Reproduce the normalization, ensemble and size-estimation experiments."""
    try:
        cfg = experiments.ExperimentConfig(
            experiment=name, mc_reps=mc_reps, seed=seed, n=n, sizes=tuple(parse_counts(sizes)),
            simulations=tuple(s for s in re.split(r'[,\s]+', simulations) if s), max_iters=max_iters,
            kmeans_init=kmeans_init, n_jobs=threads or settings.thread_count())
    except (ExperimentError, ConfigError) as exc:
        raise click.UsageError(str(exc)) from exc

    tasks = len(experiments.plan(cfg))
    click.echo(f'Running {name}: {tasks} Monte Carlo draws.')
    try:
        replicates, curves = experiments.run_experiment(cfg, progress=progress_printer(tasks))
    except EnsembleError as exc:
        raise DataError(str(exc)) from exc

    os.makedirs(output_dir, exist_ok=True)
    config = cfg.to_dict()
    summary = experiments.summarize(replicates)
    experiments.write_table(replicates, os.path.join(output_dir, f'{name}_replicates.csv'), config)
    experiments.write_table(summary, os.path.join(output_dir, f'{name}_summary.csv'), config)
    text = experiments.render(summary)
    experiments.write_text(text, os.path.join(output_dir, f'{name}_summary.txt'), config)
    if not curves.empty:
        experiments.write_table(curves, os.path.join(output_dir, f'{name}_curves.csv'), config)
        experiments.write_table(experiments.summarize_curves(curves),
                                os.path.join(output_dir, f'{name}_curves_summary.csv'), config)
    if summary['low_power'].any():
        click.echo(f'Warning: fewer than {experiments.LOW_POWER_REPS} replicates back some rows (low power).')
    click.echo(text, nl=False)
    click.echo(f'Results written to {output_dir}.')
    return EXIT_OK


@click.command('bench')
@click.option('--edges', default=','.join(str(s) for s in experiments.BENCH_EDGES), show_default=True,
              help='Edge-count sweep.')
@click.option('--k-range', default='2..10', show_default=True)
@click.option('-r', '--replicates', type=click.IntRange(min=1), default=settings.DEFAULTS['REPLICATES'], show_default=True)
@click.option('-m', '--max-iters', type=click.IntRange(min=1), default=settings.DEFAULTS['MAX_ITERS'], show_default=True)
@click.option('--seed', type=int, default=settings.DEFAULTS['SEED'], show_default=True)
@click.option('--threads', type=click.IntRange(min=1), default=None, help='Worker threads (default: GEE_THREADS or 1).')
@click.option('--output', default='bench.csv', show_default=True)
def bench_command(edges, k_range, replicates, max_iters, seed, threads, output):
    """Time the ensemble over synthetic graphs of growing edge count."""
    counts = parse_counts(edges)
    try:
        bench = experiments.run_bench(
            counts, parse_k_range(k_range), replicates=replicates, max_iters=max_iters, seed=seed,
            n_jobs=threads or settings.thread_count(),
            progress=lambda row: click.echo(f"  s={row['s']} n={row['n']}: {row['wall_time']:.2f}s"))
    except (ExperimentError, ConfigError) as exc:
        raise click.UsageError(str(exc)) from exc
    config = {'edges': counts, 'k_range': list(parse_k_range(k_range)), 'replicates': replicates,
              'max_iters': max_iters, 'seed': seed}
    experiments.write_table(bench, output, config)
    for (s1, s2), growth in zip(zip(bench['s'][:-1], bench['s'][1:]), experiments.growth_per_decade(bench)):
        click.echo(f'  {s1} -> {s2} edges: {growth:.2f}x per 10x edges')
    click.echo(f'Wrote {output}.')
    return EXIT_OK


cli = create_cli()

if __name__ == '__main__':
    cli()
