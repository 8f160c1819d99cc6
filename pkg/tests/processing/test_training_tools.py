import numpy as np
import pandas as pd
import pytest

from sembed.generic.dataset_tools import LabeledDataset, split_dataset
from sembed.generic.handler_config import TrainConfig
from sembed.generic.unit_check import (DatasetError, DimensionError,
                                       DivergedError, DomainError, SpecError)
from sembed.postprocessing.embedding_statistics import accuracy, evaluate
from sembed.preprocessing.image_transforms import normalize_mean
from sembed.processing.loss_tools import cross_entropy_logit_grad
from sembed.processing.network_tools import (LayerSpec, ModelParams,
                                             backward, forward_features,
                                             forward_logits, init_params,
                                             make_layer_specs)
from sembed.processing.pairing_tools import sample_pairs
from sembed.processing.training_tools import (get_steps_per_epoch, sgd_step,
                                              train)
from sembed.testing.dataset_tools import SyntheticSpec, gen_synthetic
from sembed.testing.oracle_tools import oracle_sgd


def _scalar_params(w=1., b=0.):
    layers = [LayerSpec('dense', 1, 1)]
    return ModelParams(layers, [(np.array([[w]]), np.array([b]))],
                       np.array([[1.]]), np.array([0.]))


def _blobs(seed=42, per_class=100, n_classes=8):
    spec = SyntheticSpec(mode='blobs', n_classes=n_classes,
                         per_class=per_class, dim=16, spread=.5,
                         separation=4., seed=seed)
    return normalize_mean(gen_synthetic(spec))[0]


def test_sgd_step_zero_gradient():
    params = init_params(make_layer_specs(4, (3, ), 2), 3,
                         np.random.default_rng(0))
    updated = sgd_step(params, params.zeros_like(), .1)
    for A, B in zip(params.arrays(), updated.arrays()):
        np.testing.assert_array_equal(A, B)


def test_sgd_step_scalar():
    params = _scalar_params(w=1.)
    grads = [np.array([[2.]]), np.zeros(1), np.zeros((1, 1)), np.zeros(1)]
    updated = sgd_step(params, grads, .1)
    assert np.isclose(updated.extractor_layers[0][0][0, 0], .8)
    # the input is left alone
    assert params.extractor_layers[0][0][0, 0] == 1.


def test_sgd_step_sequence():
    rng = np.random.default_rng(3)
    params = init_params(make_layer_specs(3, (2, ), 2), 2, rng)
    g_1 = [rng.normal(size=A.shape) for A in params.arrays()]
    g_2 = [rng.normal(size=A.shape) for A in params.arrays()]
    twice = sgd_step(sgd_step(params, g_1, .05), g_2, .05)

    for k, A in enumerate(params.arrays()):
        values = oracle_sgd(A.ravel().tolist(), g_1[k].ravel().tolist(), .05)
        values = oracle_sgd(values, g_2[k].ravel().tolist(), .05)
        np.testing.assert_array_equal(twice.arrays()[k].ravel(), values)


def test_sgd_step_errors():
    params = _scalar_params()
    with pytest.raises(DimensionError):
        sgd_step(params, [np.zeros((1, 2)), np.zeros(1), np.zeros((1, 1)),
                          np.zeros(1)], .1)
    with pytest.raises(DimensionError):
        sgd_step(params, [np.zeros((1, 1))], .1)
    with pytest.raises(SpecError):
        sgd_step(params, params.zeros_like(), -.1)


def test_get_steps_per_epoch():
    assert get_steps_per_epoch(800, 32) == 13
    assert get_steps_per_epoch(64, 32) == 1
    assert get_steps_per_epoch(65, 32) == 2


def test_train_zero_learning_rate():
    ds = _blobs(per_class=10, n_classes=3)
    cfg = TrainConfig(learning_rate=0., epochs=3, batch_size=8, seed=4,
                      layers=(6, ), embed_dim=3)
    params, log = train(ds, cfg)

    rng = np.random.default_rng(cfg.seed)
    start = init_params(make_layer_specs(ds.dim, cfg.layers, cfg.embed_dim),
                        ds.n_classes, rng)
    for A, B in zip(params.arrays(), start.arrays()):
        np.testing.assert_array_equal(A, B)
    assert len(log) == cfg.epochs
    assert list(log.columns) == ['epoch', 'total', 'cls', 'contrastive',
                                 'acc']
    assert np.all(np.isfinite(log.to_numpy()))


def test_train_deterministic():
    ds = _blobs(per_class=10, n_classes=4)
    cfg = TrainConfig(epochs=2, batch_size=8, seed=9, layers=(8, ),
                      embed_dim=4)
    params_1, log_1 = train(ds, cfg)
    params_2, log_2 = train(ds, cfg)
    for A, B in zip(params_1.arrays(), params_2.arrays()):
        np.testing.assert_array_equal(A, B)
    pd.testing.assert_frame_equal(log_1, log_2)


def _train_classification_only(ds, cfg):
    """ the same pair stream as `train`, with a plain cross-entropy """
    rng = np.random.default_rng(cfg.seed)
    params = init_params(make_layer_specs(ds.dim, cfg.layers, cfg.embed_dim),
                         ds.n_classes, rng)
    n_steps = get_steps_per_epoch(len(ds), cfg.batch_size)
    for _ in range(cfg.epochs):
        for _ in range(n_steps):
            batch = sample_pairs(ds, cfg.batch_size, rng)
            c_i, c_j = ds.labels[batch.idx_a], ds.labels[batch.idx_b]
            f_i, trace_i = forward_features(params, ds.features[batch.idx_a])
            f_j, trace_j = forward_features(params, ds.features[batch.idx_b])
            g_i = cross_entropy_logit_grad(forward_logits(params, f_i), c_i)
            g_j = cross_entropy_logit_grad(forward_logits(params, f_j), c_j)

            n, W = len(batch), params.classifier_weights
            grads_i = backward(params, trace_i, (g_i @ W.T) / n).arrays()
            grads_j = backward(params, trace_j, (g_j @ W.T) / n).arrays()
            grads = [a + b for a, b in zip(grads_i, grads_j)]
            grads[-2] = (f_i.T @ g_i + f_j.T @ g_j) / n
            grads[-1] = (np.sum(g_i, axis=0) + np.sum(g_j, axis=0)) / n
            params = params.with_arrays(
                [p - cfg.learning_rate * g
                 for p, g in zip(params.arrays(), grads)])
    return params


def test_train_without_contrastive_is_classification():
    ds = _blobs(per_class=12, n_classes=3)
    cfg = TrainConfig(trade_off=0., epochs=3, batch_size=6, seed=2,
                      layers=(5, ), embed_dim=3, learning_rate=.05)
    params, log = train(ds, cfg)
    reference = _train_classification_only(ds, cfg)
    for A, B in zip(params.arrays(), reference.arrays()):
        np.testing.assert_array_equal(A, B)
    # still reported
    assert np.all(log['contrastive'] >= 0)


def test_train_overflow_is_divergence():
    ds = _blobs(per_class=10, n_classes=3)
    cfg = TrainConfig(epochs=2, batch_size=8, seed=4, layers=(6, ),
                      embed_dim=3)
    start = init_params(make_layer_specs(ds.dim, cfg.layers, cfg.embed_dim),
                        ds.n_classes, np.random.default_rng(cfg.seed))
    huge = start.with_arrays([A * 1e300 for A in start.arrays()])
    with np.errstate(over='ignore', invalid='ignore'):
        with pytest.raises(DivergedError) as err:
            train(ds, cfg, params=huge)
    assert err.value.epoch == 0 and err.value.step == 0
    assert isinstance(err.value.__cause__, DomainError)


def test_train_unpairable():
    ds = LabeledDataset(np.zeros((4, 2)), np.zeros(4, dtype=int))
    with pytest.raises(DatasetError):
        train(ds, TrainConfig(epochs=1))


def test_train_textures_with_crops():
    spec = SyntheticSpec(mode='textures', n_classes=3, per_class=6, side=8,
                         seed=1)
    ds = normalize_mean(gen_synthetic(spec))[0]
    cfg = TrainConfig(epochs=2, batch_size=4, seed=0, layers=(6, ),
                      embed_dim=3, crop_side=6)
    params, log = train(ds, cfg)
    assert params.in_dim == 36
    assert len(log) == 2
    # evaluation crops the center
    assert 0. <= accuracy(params, ds) <= 1.


@pytest.mark.parametrize('seed', [1, 2, 3, 4, 5])
def test_train_blobs_converges(seed):
    ds = _blobs()
    params, log = train(ds, TrainConfig(seed=seed))
    assert log['acc'].iloc[-1] > .9
    assert log['total'].iloc[-1] < log['total'].iloc[0]


@pytest.mark.parametrize('seed', [1, 2, 3, 4, 5])
def test_contrastive_term_separates(seed):
    ds_train, ds_test = split_dataset(gen_synthetic(SyntheticSpec(seed=42)),
                                      test_fraction=.2, rng=0)
    ds_train, (ds_test, ), _ = normalize_mean(ds_train, [ds_test])

    cfg = TrainConfig(seed=seed)
    baseline = evaluate(train(ds_train, cfg.updated(trade_off=0.))[0],
                        ds_test)
    joint = evaluate(train(ds_train, cfg.updated(trade_off=1.))[0], ds_test)
    assert joint.separability > baseline.separability
    assert joint.accuracy >= baseline.accuracy - .02
