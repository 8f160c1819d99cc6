from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .unit_check import DatasetError, DimensionError


@dataclass
class LabeledDataset:
    """ samples with integer class labels

    Attributes
    ----------
    features : numpy.ndarray, size=(m,d), dtype=float
        one flattened sample per row
    labels : numpy.ndarray, size=(m,), dtype=int
        class of every sample, in 0...n_classes-1
    n_classes : integer
        number of classes, by default one more than the largest label
    mean : numpy.ndarray, size=(d,)
        training mean that was subtracted, None when not normalized
    image_shape : tuple
        shape of a single sample when it is an image, e.g.: (side, side)
    """
    features: np.ndarray
    labels: np.ndarray
    n_classes: int = None
    mean: np.ndarray = None
    image_shape: tuple = None

    def __post_init__(self):
        self.features = np.asarray(self.features, dtype=np.float64)
        self.labels = np.asarray(self.labels).astype(int)
        if self.features.ndim == 1 and self.features.size == 0:
            self.features = self.features.reshape(0, 0)
        if self.features.ndim != 2:
            raise DimensionError('features should be given as an array with '
                                 'one sample per row')
        if self.labels.shape != (self.features.shape[0], ):
            raise DimensionError(f'{self.features.shape[0]} samples, but '
                                 f'{self.labels.size} labels')
        if self.n_classes is None:
            self.n_classes = int(self.labels.max()) + 1 if len(self) else 0
        self.n_classes = int(self.n_classes)
        if len(self) and (self.labels.min() < 0
                          or self.labels.max() >= self.n_classes):
            raise DatasetError(f'labels should lie within 0...'
                               f'{self.n_classes - 1}')
        if self.image_shape is not None:
            self.image_shape = tuple(int(s) for s in self.image_shape)
            if int(np.prod(self.image_shape)) != self.dim:
                raise DimensionError(f'image shape {self.image_shape} does '
                                     f'not fit {self.dim} features')

    def __len__(self):
        return self.features.shape[0]

    @property
    def dim(self):
        return self.features.shape[1]

    @property
    def samples(self):
        return list(zip(self.features, self.labels.tolist()))

    def with_features(self, features, **kwargs):
        return replace(self, features=features, **kwargs)

    def subset(self, idx):
        idx = np.asarray(idx, dtype=int)
        return replace(self, features=self.features[idx],
                       labels=self.labels[idx])


def class_counts(ds):
    return np.bincount(ds.labels, minlength=ds.n_classes)


def split_dataset(ds, test_fraction=.2, rng=None):
    """ stratified split into a training and a testing part

    Parameters
    ----------
    ds : LabeledDataset
    test_fraction : float, range=0...1
        share of every class that goes into the testing part, rounded to the
        nearest integer
    rng : {numpy.random.Generator, integer, None}
        random generator, or seed for one

    Returns
    -------
    train, test : LabeledDataset
        both keep the sample order of `ds`
    """
    if not 0. <= test_fraction <= 1.:
        raise DatasetError('test fraction should lie within 0...1')
    rng = np.random.default_rng(rng)
    is_test = np.zeros(len(ds), dtype=bool)
    for k in range(ds.n_classes):
        idx = np.flatnonzero(ds.labels == k)
        n_test = int(np.round(idx.size * test_fraction))
        is_test[rng.permutation(idx)[:n_test]] = True
    return ds.subset(np.flatnonzero(~is_test)), \
        ds.subset(np.flatnonzero(is_test))
