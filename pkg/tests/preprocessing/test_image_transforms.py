import numpy as np
import pytest

from sembed.generic.dataset_tools import LabeledDataset
from sembed.generic.unit_check import DimensionError, DomainError
from sembed.preprocessing.image_transforms import (augment, augment_batch,
                                                   center_crop, denormalize,
                                                   get_image_side,
                                                   match_input_size,
                                                   normalize_mean)


def _image_dataset(m=4, side=6, seed=0):
    rng = np.random.default_rng(seed)
    return LabeledDataset(rng.normal(size=(m, side**2)),
                          np.arange(m) % 2, image_shape=(side, side))


def test_normalize_mean():
    train = LabeledDataset(np.array([[1., 1.], [3., 3.]]), [0, 1])
    test = LabeledDataset(np.array([[2., 5.]]), [1])
    train_n, (test_n, ), mean = normalize_mean(train, [test])
    np.testing.assert_array_equal(mean, [2., 2.])
    np.testing.assert_array_equal(train_n.features, [[-1., -1.], [1., 1.]])
    # centered with the mean of the training set, not its own
    np.testing.assert_array_equal(test_n.features, [[0., 3.]])
    np.testing.assert_array_equal(test_n.mean, mean)
    # the input is left untouched
    np.testing.assert_array_equal(train.features, [[1., 1.], [3., 3.]])


def test_normalize_mean_is_centered():
    rng = np.random.default_rng(3)
    train = LabeledDataset(rng.normal(5., 2., size=(50, 7)),
                           rng.integers(3, size=50))
    train_n = normalize_mean(train)[0]
    assert np.all(np.abs(train_n.features.mean(axis=0)) < 1e-10)
    back = denormalize(train_n)
    np.testing.assert_allclose(back.features, train.features, atol=1e-12)
    assert back.mean is None
    assert denormalize(train) is train


def test_normalize_mean_errors():
    empty = LabeledDataset(np.zeros((0, 2)), np.zeros(0, dtype=int))
    with pytest.raises(DomainError):
        normalize_mean(empty)
    train = LabeledDataset(np.zeros((2, 2)), [0, 1])
    other = LabeledDataset(np.zeros((2, 3)), [0, 1])
    with pytest.raises(DimensionError):
        normalize_mean(train, [other])


def test_get_image_side():
    assert get_image_side(_image_dataset(side=6)) == 6
    assert get_image_side(LabeledDataset(np.zeros((1, 9)), [0])) == 3
    with pytest.raises(DimensionError):
        get_image_side(LabeledDataset(np.zeros((1, 8)), [0]))


def test_augment():
    image = np.arange(36.).reshape(6, 6)
    crop = augment(image, 4, np.random.default_rng(1))
    assert crop.shape == (4, 4)
    again = augment(image, 4, np.random.default_rng(1))
    np.testing.assert_array_equal(crop, again)
    # every crop is a (mirrored) window of the image
    rows = np.unique(crop // 6)
    assert rows.size == 4 and np.all(np.diff(rows) == 1)
    # full size crop, only mirroring can happen
    full = augment(image, 6, np.random.default_rng(2))
    assert np.array_equal(full, image) or \
        np.array_equal(full, np.fliplr(image))
    with pytest.raises(DimensionError):
        augment(image, 7, np.random.default_rng(1))
    with pytest.raises(DimensionError):
        augment(np.zeros((4, 5)), 2, np.random.default_rng(1))


def test_augment_mirror():
    image = np.array([[1., 2.], [3., 4.]])
    crops = [augment(image, 2, np.random.default_rng(seed))
             for seed in range(20)]
    mirrored = [np.array_equal(c, [[2., 1.], [4., 3.]]) for c in crops]
    kept = [np.array_equal(c, image) for c in crops]
    assert any(mirrored) and any(kept)
    assert all(m != k for m, k in zip(mirrored, kept))


def test_augment_offsets_are_uniform(n_draws=10**4, side=6, crop_side=4):
    image = np.arange(side**2, dtype=float).reshape(side, side)
    rng = np.random.default_rng(17)
    rows, cols, flips = [], [], []
    for _ in range(n_draws):
        crop = augment(image, crop_side, rng)
        # the top-left pixel is the smallest, mirrored or not
        i, j = divmod(int(crop.min()), side)
        rows.append(i)
        cols.append(j)
        flips.append(crop[0, 0] > crop[0, 1])
    n_offsets = side - crop_side + 1
    for offsets in (rows, cols):
        freq = np.bincount(offsets, minlength=n_offsets) / n_draws
        assert freq.size == n_offsets
        np.testing.assert_allclose(freq, 1 / n_offsets, atol=.02)
    assert abs(np.mean(flips) - .5) < .02


def test_augment_batch():
    ds = _image_dataset(m=5, side=6)
    X = augment_batch(ds.features, 6, 3, np.random.default_rng(0))
    assert X.shape == (5, 9)


def test_center_crop():
    X = np.arange(25.)[np.newaxis, :]
    np.testing.assert_array_equal(center_crop(X, 5, 3),
                                  [[6., 7., 8., 11., 12., 13., 16., 17., 18.]])
    np.testing.assert_array_equal(center_crop(X, 5, 5), X)


def test_match_input_size():
    ds = _image_dataset(m=3, side=6)
    assert match_input_size(ds, 36) is ds.features
    assert match_input_size(ds, 16).shape == (3, 16)
    with pytest.raises(DimensionError):
        match_input_size(ds, 15)
    with pytest.raises(DimensionError):
        match_input_size(ds, 49)
