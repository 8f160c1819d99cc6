from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..generic.unit_check import DatasetError, correct_positive_integer


@dataclass
class PairBatch:
    """ index pairs into a dataset, tagged same-class or not

    Attributes
    ----------
    idx_a, idx_b : numpy.ndarray, size=(k,), dtype=int
        sample indices of the first and second image of every pair
    same : numpy.ndarray, size=(k,), dtype=bool
        do the two images share their label
    """
    idx_a: np.ndarray
    idx_b: np.ndarray
    same: np.ndarray

    def __len__(self):
        return self.idx_a.size

    @property
    def pairs(self):
        return list(zip(self.idx_a.tolist(), self.idx_b.tolist(),
                        self.same.tolist()))


def get_class_members(labels, n_classes):
    """ sample indices per class

    Parameters
    ----------
    labels : numpy.ndarray, size=(m,), dtype=int
        class label of every sample
    n_classes : integer
        number of classes

    Returns
    -------
    members : list of numpy.ndarray
        for every class 0...n_classes-1 the indices of its samples
    """
    labels = np.asarray(labels)
    return [np.flatnonzero(labels == k) for k in range(n_classes)]


def check_pairable(labels, n_classes):
    if n_classes < 2:
        raise DatasetError(f'pairs need at least two classes, the dataset '
                           f'has {n_classes}')
    members = get_class_members(labels, n_classes)
    for k, idx in enumerate(members):
        if idx.size < 2:
            raise DatasetError(f'class {k} has {idx.size} sample(s), at '
                               f'least two are needed for pairs')
    return members


def sample_pairs(ds, batch_size, rng):
    """ draw a balanced batch of same-class and different-class pairs

    Parameters
    ----------
    ds : LabeledDataset
        dataset with at least two classes, each with two or more samples
    batch_size : integer, {x ∈ ℕ | x ≥ 1}
        number of pairs
    rng : numpy.random.Generator
        random generator, consumed in sequence

    Returns
    -------
    batch : PairBatch
        ⌈k/2⌉ same-class pairs, followed by ⌊k/2⌋ different-class pairs

    Notes
    -----
    Sampling is class-uniform, not sample-uniform: a same-class pair picks a
    class and then two distinct members, a different-class pair picks two
    distinct classes and then one member of each.
    """
    batch_size = correct_positive_integer(batch_size, 'batch_size')
    members = check_pairable(ds.labels, ds.n_classes)
    n_same = (batch_size + 1) // 2

    idx_a = np.zeros(batch_size, dtype=int)
    idx_b = np.zeros(batch_size, dtype=int)
    for k in range(batch_size):
        if k < n_same:
            cls = members[rng.integers(ds.n_classes)]
            idx_a[k], idx_b[k] = rng.choice(cls, size=2, replace=False)
        else:
            c_a, c_b = rng.choice(ds.n_classes, size=2, replace=False)
            idx_a[k] = members[c_a][rng.integers(members[c_a].size)]
            idx_b[k] = members[c_b][rng.integers(members[c_b].size)]
    same = ds.labels[idx_a] == ds.labels[idx_b]
    return PairBatch(idx_a, idx_b, same)
