"""Edge-list parsing and writing, label and embedding output, class counts."""
import json
import logging
import re

import numpy as np
import pandas as pd

from .errors import EmbeddingError, GraphFormatError, GraphValidationError, LabelError
from .models import UNASSIGNED, EdgeList, LabelVector

logger = logging.getLogger(__name__)

FORMATS = ('csv', 'json')

_SPLIT = re.compile(r'[,\s]+')
_VERTEX_HEADER = re.compile(r'^#\s*n_vertices\s*[:=]\s*(\d+)\s*$')


def format_float(value):
    return np.format_float_positional(value, unique=True, trim='-')


def _split_line(line, delimiter):
    if delimiter is None:
        return _SPLIT.split(line.strip())
    return [field.strip() for field in line.strip().split(delimiter)]


def _vertex(path, lineno, text, index_base):
    try:
        value = float(text)
    except ValueError:
        raise GraphFormatError(path, lineno, f'vertex id is not an integer: {text!r}') from None
    if not value.is_integer():
        raise GraphFormatError(path, lineno, f'vertex id is not an integer: {text!r}')
    vertex = int(value) - index_base
    if vertex < 0:
        raise GraphFormatError(path, lineno, f'vertex id {text} is below index_base {index_base}')
    return vertex


def _weight(path, lineno, text):
    try:
        value = float(text)
    except ValueError:
        raise GraphFormatError(path, lineno, f'weight is not a number: {text!r}') from None
    if not np.isfinite(value):
        raise GraphFormatError(path, lineno, f'weight is not finite: {text!r}')
    return value


def parse_edgelist(path, delimiter=None, index_base=1, directed=False,
                   default_weight=1.0, n_vertices=None):
    """Read an edge-list text file into a validated EdgeList.

    Each non-comment line holds `u v` or `u v w`, whitespace- or
    comma-delimited unless `delimiter` is given. A `# n_vertices: N` comment
    declares the vertex count; the `n_vertices` argument overrides both the
    header and the default of the largest index observed.
    """
    if index_base not in (0, 1):
        raise GraphValidationError(f'index_base must be 0 or 1, got {index_base}')
    if not np.isfinite(default_weight):
        raise GraphValidationError('default_weight must be finite')

    sources, targets, weights, linenos = [], [], [], []
    declared = None
    with open(path, 'r', encoding='utf-8') as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.strip()
            if not line:
                continue
            if line.startswith('#'):
                match = _VERTEX_HEADER.match(line)
                if match:
                    declared = int(match.group(1))
                continue
            fields = _split_line(line, delimiter)
            if len(fields) not in (2, 3):
                raise GraphFormatError(path, lineno, f'expected 2 or 3 fields, got {len(fields)}')
            sources.append(_vertex(path, lineno, fields[0], index_base))
            targets.append(_vertex(path, lineno, fields[1], index_base))
            weights.append(_weight(path, lineno, fields[2]) if len(fields) == 3 else float(default_weight))
            linenos.append(lineno)

    if n_vertices is not None:
        declared = int(n_vertices)
    if not linenos and declared is None:
        raise GraphFormatError(path, None, 'file contains no edges')

    sources = np.array(sources, dtype=np.int64)
    targets = np.array(targets, dtype=np.int64)
    if declared is None:
        count = int(max(sources.max(), targets.max())) + 1
    else:
        count = declared
        above = (sources >= declared) | (targets >= declared)
        if above.any():
            lineno = linenos[int(np.argmax(above))]
            raise GraphFormatError(path, lineno, f'vertex index exceeds declared vertex count {declared}')

    try:
        graph = EdgeList(count, sources, targets, np.array(weights, dtype=np.float64), directed)
    except GraphValidationError as exc:
        raise GraphFormatError(path, None, str(exc)) from exc
    logger.info('Parsed %s: %d vertices, %d edges (%s)', path, graph.n_vertices, graph.n_edges,
                'directed' if directed else 'undirected')
    return graph


def write_edgelist(graph, path, index_base=1):
    frame = pd.DataFrame({
        'source': graph.sources + index_base,
        'target': graph.targets + index_base,
        'weight': graph.weights,
    })
    with open(path, 'w', encoding='utf-8', newline='') as fh:
        fh.write(f'# n_vertices: {graph.n_vertices}\n')
        frame.to_csv(fh, sep=' ', header=False, index=False, float_format=format_float, lineterminator='\n')


def class_counts(y):
    assigned = y.labels[y.labels != UNASSIGNED]
    return np.bincount(assigned - 1, minlength=y.k).astype(np.int64)


def _check_format(fmt):
    if fmt not in FORMATS:
        raise ValueError(f'format must be one of {FORMATS}, got {fmt!r}')


def write_labels(y, path, format='csv', index_base=1):
    """Write labels as `vertex_id,label` rows (csv) or a single JSON object."""
    _check_format(format)
    if format == 'json':
        payload = {'index_base': index_base, 'k': y.k, 'labels': y.labels.tolist()}
        with open(path, 'w', encoding='utf-8') as fh:
            fh.write(json.dumps(payload, sort_keys=True) + '\n')
        return
    frame = pd.DataFrame({
        'vertex_id': np.arange(y.n_vertices, dtype=np.int64) + index_base,
        'label': y.labels,
    })
    frame.to_csv(path, header=False, index=False, lineterminator='\n')


def write_embedding(z, path, format='csv'):
    _check_format(format)
    if z.values.size == 0:
        raise EmbeddingError('refusing to write an empty embedding')
    if format == 'json':
        payload = {
            'n_vertices': z.n_vertices,
            'k': z.k,
            'normalized': z.normalized,
            'values': z.values.tolist(),
        }
        with open(path, 'w', encoding='utf-8') as fh:
            fh.write(json.dumps(payload, sort_keys=True) + '\n')
        return
    pd.DataFrame(z.values).to_csv(path, header=False, index=False, float_format=format_float,
                                  lineterminator='\n')


def read_labels(path, index_base=1, n_vertices=None, k=None):
    """Read a `vertex_id,label` CSV; vertices absent from the file stay unassigned."""
    try:
        frame = pd.read_csv(path, header=None, names=['vertex_id', 'label'], comment='#',
                            skipinitialspace=True, dtype=str)
    except pd.errors.EmptyDataError:
        raise GraphFormatError(path, None, 'label file is empty') from None
    except pd.errors.ParserError as exc:
        raise GraphFormatError(path, None, str(exc)) from exc
    numeric = frame.apply(pd.to_numeric, errors='coerce')
    bad = numeric.isna().any(axis=1) | (numeric % 1 != 0).any(axis=1)
    if bad.any():
        row = int(np.argmax(bad.to_numpy()))
        raise GraphFormatError(path, None, f'row {row + 1} is not a pair of integers: {frame.iloc[row].tolist()}')
    vertices = numeric['vertex_id'].to_numpy(dtype=np.int64) - index_base
    values = numeric['label'].to_numpy(dtype=np.int64)
    if len(vertices) and vertices.min() < 0:
        raise GraphFormatError(path, None, f'vertex id below index_base {index_base}')
    count = n_vertices if n_vertices is not None else (int(vertices.max()) + 1 if len(vertices) else 0)
    if len(vertices) and vertices.max() >= count:
        raise GraphFormatError(path, None, f'vertex id exceeds vertex count {count}')
    labels = np.full(count, UNASSIGNED, dtype=np.int64)
    labels[vertices] = values
    alphabet = k if k is not None else (int(values.max()) if len(values) else 0)
    try:
        return LabelVector(labels, alphabet)
    except LabelError as exc:
        raise GraphFormatError(path, None, str(exc)) from exc
