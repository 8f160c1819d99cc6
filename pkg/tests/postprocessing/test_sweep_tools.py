import numpy as np
import pytest

from sembed.generic.dataset_tools import split_dataset
from sembed.generic.handler_config import TrainConfig
from sembed.generic.unit_check import SpecError
from sembed.postprocessing.embedding_statistics import evaluate
from sembed.postprocessing.sweep_tools import get_sweep_grid, lambda_sweep
from sembed.preprocessing.image_transforms import normalize_mean
from sembed.processing.training_tools import train
from sembed.testing.dataset_tools import SyntheticSpec, gen_synthetic


def _split_blobs(n_classes=8, per_class=100, seed=42):
    spec = SyntheticSpec(mode='blobs', n_classes=n_classes,
                         per_class=per_class, dim=16, spread=.5,
                         separation=4., seed=seed)
    ds_train, ds_test = split_dataset(gen_synthetic(spec), test_fraction=.2,
                                      rng=0)
    ds_train, (ds_test, ), _ = normalize_mean(ds_train, [ds_test])
    return ds_train, ds_test


def _small_config():
    return TrainConfig(epochs=3, batch_size=8, layers=(8, ), embed_dim=4)


def test_get_sweep_grid():
    grid = get_sweep_grid([1., .5], [3, 4])
    assert grid == [(0., 3), (0., 4), (1., 3), (1., 4), (.5, 3), (.5, 4)]
    assert get_sweep_grid([2., 0.], [1]) == [(2., 1), (0., 1)]
    for trade_offs, seeds in (([], [1]), ([1.], []), ([-1.], [1]),
                              ([1.], [2, -1])):
        with pytest.raises(SpecError):
            get_sweep_grid(trade_offs, seeds)


def test_lambda_sweep_baseline_only():
    ds_train, ds_test = _split_blobs(n_classes=3, per_class=20)
    table = lambda_sweep(ds_train, ds_test, _small_config(), [0.], [1, 2])
    assert list(table['lambda']) == [0., 0.]
    assert list(table['seed']) == [1, 2]
    assert list(table.columns) == ['lambda', 'seed', 'accuracy',
                                   'separability', 'error']


def test_lambda_sweep_rows_match_single_runs(seed=5):
    ds_train, ds_test = _split_blobs(n_classes=3, per_class=20)
    cfg = _small_config()
    table = lambda_sweep(ds_train, ds_test, cfg, [0., 1.], [seed])
    assert len(table) == 2 and np.all(table['error'] == '')

    for lam, row in zip((0., 1.), table.itertuples()):
        params, _ = train(ds_train, cfg.updated(trade_off=lam, seed=seed))
        metrics = evaluate(params, ds_test, cfg.margin)
        assert row.accuracy == metrics.accuracy
        assert row.separability == metrics.separability


def test_lambda_sweep_parallel():
    ds_train, ds_test = _split_blobs(n_classes=3, per_class=20)
    cfg = _small_config()
    serial = lambda_sweep(ds_train, ds_test, cfg, [.5, 2.], [1, 2])
    parallel = lambda_sweep(ds_train, ds_test, cfg, [.5, 2.], [1, 2],
                            n_jobs=2)
    assert serial.equals(parallel)


def test_lambda_sweep_records_failures():
    ds_train, ds_test = _split_blobs(n_classes=3, per_class=20)
    # distance statistics need two classes
    ds_test = ds_test.subset(np.flatnonzero(ds_test.labels == 0))
    table = lambda_sweep(ds_train, ds_test, _small_config(), [1.], [1])
    assert len(table) == 2
    assert np.all(np.isnan(table['accuracy']))
    assert np.all(table['error'].str.len() > 0)


def test_lambda_sweep_large_trade_off_hurts():
    ds_train, ds_test = _split_blobs()
    trade_offs = [0., .1, .5, 1., 2., 5., 10., 100.]
    table = lambda_sweep(ds_train, ds_test, TrainConfig(), trade_offs,
                         [1, 2, 3, 4, 5], n_jobs=4)
    # a diverged run counts as a failure
    table['accuracy'] = table['accuracy'].fillna(0.)
    medians = table.groupby('lambda')['accuracy'].median()
    assert medians[100.] < medians[[.1, .5, 1., 2.]].max()
    assert medians[[.1, .5, 1., 2.]].max() > .9
