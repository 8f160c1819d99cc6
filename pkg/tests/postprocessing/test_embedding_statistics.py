import os
import tempfile

import numpy as np
import pytest
from sklearn.neighbors import KNeighborsClassifier

from sembed.generic.data_io import read_embeddings
from sembed.generic.dataset_tools import LabeledDataset
from sembed.generic.unit_check import (DegenerateInputError, DimensionError,
                                       DomainError)
from sembed.postprocessing.embedding_statistics import (accuracy,
                                                        distance_stats,
                                                        evaluate,
                                                        export_embeddings,
                                                        knn_accuracy, pca2d)
from sembed.processing.network_tools import (LayerSpec, ModelParams, embed,
                                             init_params, make_layer_specs)
from sembed.testing.oracle_tools import (oracle_accuracy,
                                         oracle_distance_means)


def _identity_params(dim=2, n_classes=2):
    return ModelParams([LayerSpec('dense', dim, dim)],
                       [(np.eye(dim), np.zeros(dim))],
                       np.zeros((dim, n_classes)))


def _random_problem(m=30, dim=5, n_classes=3, seed=0):
    rng = np.random.default_rng(seed)
    params = init_params(make_layer_specs(dim, (8, ), 4), n_classes, rng)
    labels = np.arange(m) % n_classes
    ds = LabeledDataset(rng.normal(size=(m, dim)), labels,
                        n_classes=n_classes)
    return params, ds


def test_accuracy_constant_predictor():
    params = ModelParams([LayerSpec('dense', 2, 2)],
                         [(np.eye(2), np.zeros(2))], np.zeros((2, 4)),
                         np.array([0., 0., 5., 0.]))
    X = np.random.default_rng(1).normal(size=(4, 2))
    assert accuracy(params, LabeledDataset(X, [2] * 4, n_classes=4)) == 1.
    assert accuracy(params, LabeledDataset(X, np.arange(4))) == .25


def test_accuracy_ties_go_to_lowest_class():
    params = _identity_params(n_classes=3)
    ds = LabeledDataset(np.ones((2, 2)), [0, 1], n_classes=3)
    assert accuracy(params, ds) == .5


def test_accuracy_matches_loop():
    params, ds = _random_problem(seed=4)
    assert accuracy(params, ds) == \
        oracle_accuracy(params, ds.features, ds.labels)
    with pytest.raises(DomainError):
        accuracy(params, ds.subset([]))


def test_distance_stats_by_hand():
    X = np.array([[0., 0.], [0., 1.], [3., 0.], [3., 1.]])
    ds = LabeledDataset(X, [0, 0, 1, 1])
    metrics = distance_stats(_identity_params(), ds, margin=3.1)
    assert np.isclose(metrics.mean_intra, 1.)
    mean_inter = (6. + 2 * np.sqrt(10.)) / 4
    assert np.isclose(metrics.mean_inter, mean_inter)
    assert np.isclose(metrics.separability, mean_inter)
    assert metrics.margin_violation_rate == .5
    assert np.isnan(metrics.accuracy)


def test_distance_stats_coinciding_classes():
    X = np.array([[0., 0.], [0., 0.], [1., 0.], [1., 0.]])
    ds = LabeledDataset(X, [0, 0, 1, 1])
    metrics = distance_stats(_identity_params(), ds)
    assert metrics.mean_intra == 0. and metrics.mean_inter == 1.
    assert metrics.separability == np.inf


def test_distance_stats_matches_loop():
    params, ds = _random_problem(m=30, seed=5)
    metrics = distance_stats(params, ds)
    intra, inter = oracle_distance_means(embed(params, ds.features),
                                         ds.labels)
    assert abs(metrics.mean_intra - intra) < 1e-12
    assert abs(metrics.mean_inter - inter) < 1e-12


def test_distance_stats_degenerate():
    params = _identity_params()
    one_class = LabeledDataset(np.eye(2), [0, 0])
    with pytest.raises(DomainError):
        distance_stats(params, one_class)
    singleton = LabeledDataset(np.eye(3)[:, :2], [0, 0, 1])
    with pytest.raises(DomainError):
        distance_stats(params, singleton)


def test_evaluate():
    params, ds = _random_problem(seed=6)
    metrics = evaluate(params, ds, margin=2.)
    assert metrics.accuracy == accuracy(params, ds)
    assert set(metrics.as_dict()) == {'accuracy', 'mean_intra',
                                      'mean_inter', 'separability',
                                      'margin_violation_rate'}


@pytest.mark.parametrize('k', [1, 5])
def test_knn_accuracy(k):
    params, ds = _random_problem(m=40, n_classes=2, seed=7)
    train, test = ds.subset(np.arange(30)), ds.subset(np.arange(30, 40))
    knn = KNeighborsClassifier(n_neighbors=k).fit(
        embed(params, train.features), train.labels)
    expected = knn.score(embed(params, test.features), test.labels)
    assert np.isclose(knn_accuracy(params, train, test, k=k), expected)


def test_pca2d_plane_keeps_distances():
    rng = np.random.default_rng(0)
    P = rng.normal(size=(50, 2)) * [3., 1.]
    Q = np.linalg.qr(rng.normal(size=(8, 2)))[0]
    X = P @ Q.T + rng.normal(size=8)
    coords = pca2d(X)
    d_P = np.linalg.norm(P[:, np.newaxis] - P[np.newaxis], axis=2)
    d_C = np.linalg.norm(coords[:, np.newaxis] - coords[np.newaxis], axis=2)
    np.testing.assert_allclose(d_C, d_P, atol=1e-6)


def test_pca2d_line():
    t = np.linspace(-1., 1., 20)[:, np.newaxis]
    X = t * np.array([1., 2., 0., -1., .5]) + 3.
    variances = pca2d(X, return_components=True)[2]
    assert variances[0] > 0 and variances[1] < 1e-9


def test_pca2d_matches_eigen_decomposition():
    rng = np.random.default_rng(2)
    X = rng.normal(size=(200, 5)) * [5., 3., 1.5, 1., .5]
    coords, V, variances = pca2d(X, return_components=True)

    X_c = X - X.mean(axis=0)
    lam, E = np.linalg.eigh(X_c.T @ X_c / X.shape[0])
    lam, E = lam[::-1][:2], E[:, ::-1][:, :2]
    E *= np.sign(E[0, :])
    np.testing.assert_allclose(variances, lam, rtol=1e-6)
    np.testing.assert_allclose(V, E.T, atol=1e-6)
    np.testing.assert_allclose(coords, X_c @ V.T, atol=1e-12)
    # sign convention
    for v in V:
        assert v[np.flatnonzero(np.abs(v) > 1e-9)[0]] > 0
    np.testing.assert_array_equal(pca2d(X), coords)


def test_pca2d_degenerate():
    with pytest.raises(DegenerateInputError):
        pca2d(np.ones((5, 3)))
    with pytest.raises(DegenerateInputError):
        pca2d(np.full((3, 2), .1))
    with pytest.raises(DegenerateInputError):
        pca2d(np.tile([1e-3, 7.3, -2.9], (6, 1)))
    with pytest.raises(DegenerateInputError):
        pca2d(np.zeros((4, 2)))
    # small but distinct embeddings are not degenerate
    coords = pca2d(1e-9 * np.arange(8.).reshape(4, 2) ** 2)
    assert coords.shape == (4, 2)
    with pytest.raises(DimensionError):
        pca2d(np.eye(2))
    with pytest.raises(DimensionError):
        pca2d(np.arange(5.)[:, np.newaxis])


def test_export_embeddings():
    params, ds = _random_problem(m=12, seed=8)
    with tempfile.TemporaryDirectory() as tmpdir:
        fname = os.path.join(tmpdir, 'emb.csv')
        F = export_embeddings(params, ds, fname)
        ids, labels, F_back, coords = read_embeddings(fname)
        assert coords is None and F_back.shape == (12, 4)
        np.testing.assert_array_equal(F_back, F)
        np.testing.assert_array_equal(labels, ds.labels)
        np.testing.assert_array_equal(ids, np.arange(12))

        export_embeddings(params, ds, fname, pca=True)
        coords = read_embeddings(fname)[3]
        np.testing.assert_array_equal(coords, pca2d(F))


def test_export_embeddings_empty():
    params, ds = _random_problem(seed=9)
    with tempfile.TemporaryDirectory() as tmpdir:
        fname = os.path.join(tmpdir, 'emb.csv')
        export_embeddings(params, ds.subset([]), fname)
        with open(fname, 'r') as f:
            text = f.read()
    assert text.strip() == 'id,label,e0,e1,e2,e3'
