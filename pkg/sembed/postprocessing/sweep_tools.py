""" repeated training runs over a grid of trade-off weights and seeds """
import logging
from multiprocessing import Pool

import numpy as np
import pandas as pd

from ..generic.unit_check import (SembedError, SpecError,
                                  correct_positive_integer,
                                  correct_positive_parameter)
from ..processing.training_tools import train
from .embedding_statistics import evaluate

logger = logging.getLogger(__name__)

SWEEP_TABLE_COLUMNS = ('lambda', 'seed', 'accuracy', 'separability', 'error')


def get_sweep_grid(trade_offs, seeds):
    """ every (trade-off, seed) cell of a sweep, in input order

    Parameters
    ----------
    trade_offs : list of float
        weights of the contrastive loss, zero is put in front when missing
    seeds : list of integer

    Returns
    -------
    cells : list of tuple
    """
    trade_offs = [correct_positive_parameter(lam, 'lambda', strict=False)
                  for lam in trade_offs]
    if len(trade_offs) == 0:
        raise SpecError('please provide at least one value for lambda')
    if len(seeds) == 0:
        raise SpecError('please provide at least one seed')
    if 0. not in trade_offs:
        trade_offs = [0.] + trade_offs
    seeds = [correct_positive_integer(seed, 'seed', strict=False)
             for seed in seeds]
    return [(lam, seed) for lam in trade_offs for seed in seeds]


def run_sweep_cell(ds_train, ds_test, cfg, trade_off, seed):
    """ train and evaluate a single cell, errors end up in the row """
    cfg = cfg.updated(trade_off=trade_off, seed=seed)
    try:
        params, _ = train(ds_train, cfg)
        metrics = evaluate(params, ds_test, cfg.margin)
    except SembedError as err:
        logger.warning('lambda=%g, seed=%d failed: %s', trade_off, seed, err)
        return (trade_off, seed, np.nan, np.nan, str(err))
    logger.info('lambda=%g, seed=%d: accuracy %.4f, separability %.4f',
                trade_off, seed, metrics.accuracy, metrics.separability)
    return (trade_off, seed, metrics.accuracy, metrics.separability, '')


def _run_sweep_cell(args):
    return run_sweep_cell(*args)


def lambda_sweep(ds_train, ds_test, cfg, trade_offs, seeds, n_jobs=1):
    """ accuracy and separability as a function of the trade-off weight

    Parameters
    ----------
    ds_train, ds_test : LabeledDataset
        normalized training and testing data
    cfg : TrainConfig
        configuration of every run, its trade-off and seed are replaced
    trade_offs : list of float
        weights of the contrastive loss, a baseline of zero is added when
        absent
    seeds : list of integer
    n_jobs : integer
        number of worker processes, rows do not depend on it

    Returns
    -------
    table : pandas.DataFrame
        one row per (lambda, seed), lambda-major in input order, with the
        columns lambda, seed, accuracy, separability and error; a failed run
        has NaN metrics and its message in `error`
    """
    n_jobs = correct_positive_integer(n_jobs, 'n_jobs')
    cells = [(ds_train, ds_test, cfg, lam, seed)
             for lam, seed in get_sweep_grid(trade_offs, seeds)]
    if n_jobs == 1 or len(cells) == 1:
        rows = [_run_sweep_cell(cell) for cell in cells]
    else:
        with Pool(processes=min(n_jobs, len(cells))) as pool:
            rows = pool.map(_run_sweep_cell, cells)
    return pd.DataFrame(rows, columns=list(SWEEP_TABLE_COLUMNS))
