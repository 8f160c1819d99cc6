""" text files: datasets, training logs, metrics, sweep tables and embeddings

Tables are comma separated, UTF-8, with `\\n` line endings and a `.` decimal
separator. Reals are written with 17 significant digits, which is enough to
read back the very same double.
"""
import csv
import os

import numpy as np
import pandas as pd

from .dataset_tools import LabeledDataset
from .unit_check import ParseError

FLOAT_FORMAT = '%.17g'
LOG_COLUMNS = ('epoch', 'total', 'cls', 'contrastive', 'acc')
SWEEP_COLUMNS = ('lambda', 'seed', 'accuracy', 'separability')
METRIC_KEYS = ('accuracy', 'mean_intra', 'mean_inter', 'separability',
               'margin_violation_rate')


def _write_table(df, fname):
    df.to_csv(fname, index=False, float_format=FLOAT_FORMAT, na_rep='nan',
              lineterminator='\n', encoding='utf-8')
    return


def _read_text_table(fname):
    """ read a comma separated file as strings, checking the row widths

    Returns
    -------
    df : pandas.DataFrame
        all cells as strings, with the columns of the header

    Notes
    -----
    Every line of the file is kept, so the line numbers in the errors match
    the file. A blank line within the table is an error.
    """
    try:
        lines = pd.read_csv(fname, header=None, names=['line'], sep='\x1f',
                            dtype=str, quoting=csv.QUOTE_NONE,
                            skip_blank_lines=False, keep_default_na=False,
                            na_filter=False)['line'].fillna('')
    except pd.errors.EmptyDataError:
        raise ParseError('file is empty, a header is expected', line=1)
    except pd.errors.ParserError as err:
        raise ParseError(f'unreadable line ({err})')
    if len(lines) == 0 or lines.iloc[0] == '':
        raise ParseError('file is empty, a header is expected', line=1)
    # blank lines at the very end are tolerated
    filled = np.flatnonzero(lines.to_numpy() != '')
    lines = lines.iloc[:filled[-1] + 1]

    fields = lines.str.split(',')
    columns = fields.iloc[0]
    widths = fields.str.len().to_numpy()
    has_empty = fields.apply(lambda row: '' in row).to_numpy()
    bad = np.flatnonzero((widths != len(columns)) | has_empty)
    if bad.size:
        raise ParseError(f'row should have {len(columns)} non-empty fields',
                         line=bad[0] + 1)
    return pd.DataFrame(fields.iloc[1:].tolist(), columns=columns,
                        dtype=object)


def _to_float_column(values, column, line_offset=2):
    try:
        return np.asarray(values, dtype=str).astype(np.float64)
    except ValueError:
        for k, cell in enumerate(values):
            try:
                float(cell)
            except ValueError:
                raise ParseError(f'non-numeric cell {cell!r} in column '
                                 f'{column!r}', line=k + line_offset)
    raise ParseError(f'column {column!r} could not be parsed')


def save_csv(ds, fname):
    """ write a dataset to a comma separated file

    Parameters
    ----------
    ds : LabeledDataset
    fname : string
        output path

    Notes
    -----
    The header reads `label,x0,x1,...,x{d-1}`, followed by one row per
    sample, e.g.: a sample of class 3 with features [0.5, -1] becomes::

        3,0.5,-1

    See Also
    --------
    load_csv
    """
    columns = [f'x{k}' for k in range(ds.dim)]
    df = pd.DataFrame(ds.features, columns=columns)
    df.insert(0, 'label', ds.labels.astype(int))
    _write_table(df, fname)
    return


def load_csv(fname, n_classes=None):
    """ read a dataset written by `save_csv`

    Parameters
    ----------
    fname : string
        path to the file
    n_classes : integer
        number of classes, by default one more than the largest label

    Returns
    -------
    ds : LabeledDataset

    Raises
    ------
    ParseError
        for a malformed header, rows of the wrong width, empty or non-numeric
        cells; the message gives the line number
    """
    if not os.path.isfile(fname):
        raise FileNotFoundError(f'{fname} does not seem to be present')
    df = _read_text_table(fname)
    columns = list(df.columns)
    expected = ['label'] + [f'x{k}' for k in range(len(columns) - 1)]
    if columns != expected:
        raise ParseError('header should read label,x0,x1,...', line=1)

    labels = _to_float_column(df['label'].to_numpy(), 'label')
    bad = np.flatnonzero((np.mod(labels, 1) != 0) | (labels < 0))
    if bad.size:
        raise ParseError('labels should be non-negative integers',
                         line=bad[0] + 2)
    X = np.zeros((len(df), len(columns) - 1))
    for k, col in enumerate(columns[1:]):
        X[:, k] = _to_float_column(df[col].to_numpy(), col)
    bad = np.flatnonzero(~np.all(np.isfinite(X), axis=1))
    if bad.size:
        raise ParseError('features should be finite', line=bad[0] + 2)
    return LabeledDataset(X, labels.astype(int), n_classes=n_classes)


def write_log(fname, log):
    """ write a training log, columns `epoch,total,cls,contrastive,acc` """
    _write_table(pd.DataFrame(log, columns=list(LOG_COLUMNS)), fname)
    return


def write_sweep(fname, table):
    """ write a sweep table, columns `lambda,seed,accuracy,separability`

    Notes
    -----
    A cell whose run failed is written with `nan` for both metrics, its
    message is not part of the file.
    """
    _write_table(pd.DataFrame(table)[list(SWEEP_COLUMNS)], fname)
    return


def _format_value(value):
    if isinstance(value, (int, np.integer)):
        return str(value)
    value = float(value)
    if np.isnan(value):
        return 'nan'
    if np.isinf(value):
        return 'inf' if value > 0 else '-inf'
    return FLOAT_FORMAT % value


def write_metrics(fname, metrics):
    """ write metrics as `key=value` lines

    Parameters
    ----------
    fname : string
        output path
    metrics : {Metrics, dict}
        the keys accuracy, mean_intra, mean_inter, separability and
        margin_violation_rate are written in that order, any other key
        follows them; an infinite separability is written as `inf`
    """
    if not isinstance(metrics, dict):
        metrics = metrics.as_dict()
    extra = [key for key in metrics if key not in METRIC_KEYS]
    with open(fname, 'w', encoding='utf-8', newline='\n') as f:
        for key in list(METRIC_KEYS) + extra:
            f.write(f'{key}={_format_value(metrics[key])}\n')
    return


def read_metrics(fname):
    """ read a metrics file, see `write_metrics` """
    metrics = {}
    with open(fname, 'r', encoding='utf-8') as f:
        for k, line in enumerate(f):
            line = line.strip()
            if not line or line.startswith('#'):
                continue
            key, sep, value = line.partition('=')
            if not sep:
                raise ParseError('expected key=value', line=k + 1)
            try:
                metrics[key.strip()] = float(value)
            except ValueError:
                raise ParseError(f'non-numeric value {value!r}', line=k + 1)
    return metrics


def write_embeddings(fname, ids, labels, F, coords=None):
    """ write embeddings, columns `id,label,e0,...,e{e-1}` and optionally
    `px,py` for a planar projection

    Parameters
    ----------
    fname : string
        output path
    ids, labels : numpy.ndarray, size=(m,), dtype=int
    F : numpy.ndarray, size=(m,e)
        embeddings
    coords : numpy.ndarray, size=(m,2)
        planar projection, when None the columns are left out
    """
    F = np.asarray(F, dtype=np.float64)
    df = pd.DataFrame(F, columns=[f'e{k}' for k in range(F.shape[1])])
    df.insert(0, 'label', np.asarray(labels, dtype=int))
    df.insert(0, 'id', np.asarray(ids, dtype=int))
    if coords is not None:
        coords = np.asarray(coords, dtype=np.float64).reshape(len(ids), 2)
        df['px'], df['py'] = coords[:, 0], coords[:, 1]
    _write_table(df, fname)
    return


def read_embeddings(fname):
    """ read an embedding file back

    Returns
    -------
    ids, labels : numpy.ndarray, dtype=int
    F : numpy.ndarray, size=(m,e)
    coords : numpy.ndarray, size=(m,2)
        None when the file holds no projection
    """
    df = _read_text_table(fname)
    emb_cols = [c for c in df.columns if c.startswith('e')]
    ids = _to_float_column(df['id'].to_numpy(), 'id').astype(int)
    labels = _to_float_column(df['label'].to_numpy(), 'label').astype(int)
    F = np.zeros((len(df), len(emb_cols)))
    for k, col in enumerate(emb_cols):
        F[:, k] = _to_float_column(df[col].to_numpy(), col)
    coords = None
    if 'px' in df.columns:
        coords = np.column_stack([
            _to_float_column(df[c].to_numpy(), c) for c in ('px', 'py')
        ]) if len(df) else np.zeros((0, 2))
    return ids, labels, F, coords
