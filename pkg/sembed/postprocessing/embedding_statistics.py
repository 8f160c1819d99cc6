""" how well an embedding separates the classes

Distance statistics run over every unordered pair of samples, hence they
are exact but quadratic in the number of samples.
"""
from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np
from scipy.spatial.distance import pdist
from sklearn.neighbors import NearestNeighbors

from ..generic.data_io import write_embeddings
from ..generic.unit_check import (DegenerateInputError, DimensionError,
                                  DomainError, correct_positive_integer,
                                  correct_positive_parameter)
from ..preprocessing.image_transforms import match_input_size
from ..processing.network_tools import embed, predict_classes

PCA_TOLERANCE = 1e-9
PCA_MAX_ITER = 1000


@dataclass
class Metrics:
    """ evaluation of a model on a dataset

    Attributes
    ----------
    accuracy : float, range=0...1
        fraction of correctly classified samples
    mean_intra : float
        mean Euclidean distance between embeddings of the same class
    mean_inter : float
        mean Euclidean distance between embeddings of different classes
    separability : float
        mean_inter / mean_intra, infinite when mean_intra is zero
    margin_violation_rate : float, range=0...1
        fraction of different-class pairs closer than the margin
    """
    accuracy: float = np.nan
    mean_intra: float = np.nan
    mean_inter: float = np.nan
    separability: float = np.nan
    margin_violation_rate: float = np.nan

    def as_dict(self):
        return asdict(self)


def _network_input(params, ds):
    return match_input_size(ds, params.in_dim)


def accuracy(params, ds):
    """ fraction of samples whose largest logit is at their label

    Parameters
    ----------
    params : ModelParams
    ds : LabeledDataset
        normalized with the training mean

    Returns
    -------
    acc : float, range=0...1

    Notes
    -----
    When several logits share the maximum, the lowest class index wins.
    """
    if len(ds) == 0:
        raise DomainError('accuracy of an empty dataset is undefined')
    c_hat = predict_classes(params, _network_input(params, ds))
    return float(np.mean(c_hat == ds.labels))


def _check_class_structure(labels, n_classes):
    counts = np.bincount(labels, minlength=n_classes)
    if np.sum(counts > 0) < 2 or np.any(counts[counts > 0] < 2):
        raise DomainError('distance statistics need at least two classes '
                          'with two or more samples each')
    return


def pair_distances(F, labels):
    """ distance of every unordered pair, with a same-class flag

    Parameters
    ----------
    F : numpy.ndarray, size=(m,e)
        embeddings
    labels : numpy.ndarray, size=(m,)

    Returns
    -------
    d : numpy.ndarray, size=(m*(m-1)/2,)
        Euclidean distances, ordered as i < j, row by row
    same : numpy.ndarray, size=(m*(m-1)/2,), dtype=bool
    """
    F = np.asarray(F, dtype=np.float64)
    i, j = np.triu_indices(F.shape[0], k=1)
    labels = np.asarray(labels)
    return pdist(F, metric='euclidean'), labels[i] == labels[j]


def get_separability(mean_intra, mean_inter):
    if mean_intra == 0:
        return np.inf
    return mean_inter / mean_intra


def distance_stats(params, ds, margin=1.):
    """ intra-class compactness and inter-class spread of the embedding

    Parameters
    ----------
    params : ModelParams
    ds : LabeledDataset
        at least two classes, each with two or more samples
    margin : float, {x ∈ ℝ | x > 0}
        contrastive margin, used for the violation rate

    Returns
    -------
    metrics : Metrics
        with the distance fields filled, accuracy is left as NaN

    Notes
    -----
    When all same-class pairs coincide the separability is reported as
    infinite, also when the different-class pairs coincide as well.
    """
    margin = correct_positive_parameter(margin, 'margin')
    _check_class_structure(ds.labels, ds.n_classes)
    F = embed(params, _network_input(params, ds))
    d, same = pair_distances(F, ds.labels)
    mean_intra, mean_inter = float(np.mean(d[same])), float(np.mean(d[~same]))
    return Metrics(mean_intra=mean_intra, mean_inter=mean_inter,
                   separability=get_separability(mean_intra, mean_inter),
                   margin_violation_rate=float(np.mean(d[~same] < margin)))


def evaluate(params, ds, margin=1.):
    """ accuracy and distance statistics in one go

    See Also
    --------
    accuracy, distance_stats
    """
    metrics = distance_stats(params, ds, margin)
    metrics.accuracy = accuracy(params, ds)
    return metrics


def knn_accuracy(params, ds_train, ds_test, k=1):
    """ accuracy of a nearest neighbour vote in the embedding space

    Parameters
    ----------
    params : ModelParams
    ds_train : LabeledDataset
        reference samples
    ds_test : LabeledDataset
        samples to classify
    k : integer, {x ∈ ℕ | x ≥ 1}
        number of neighbours, ties in the vote go to the lowest class

    Returns
    -------
    acc : float, range=0...1
    """
    k = correct_positive_integer(k, 'k')
    if len(ds_test) == 0 or len(ds_train) < k:
        raise DomainError(f'{len(ds_train)} reference samples for a vote of '
                          f'{k}, and {len(ds_test)} samples to classify')
    F_train = embed(params, _network_input(params, ds_train))
    F_test = embed(params, _network_input(params, ds_test))

    nbrs = NearestNeighbors(n_neighbors=k, algorithm='auto').fit(F_train)
    idx = nbrs.kneighbors(F_test, return_distance=False)
    votes = ds_train.labels[idx]
    n_classes = max(ds_train.n_classes, ds_test.n_classes)
    tally = np.stack([np.bincount(v, minlength=n_classes) for v in votes])
    return float(np.mean(np.argmax(tally, axis=1) == ds_test.labels))


def _power_iteration(C, V, start):
    # kept orthogonal to the components found so far
    v = start - V @ (V.T @ start) if V.size else start.copy()
    v /= np.linalg.norm(v)
    for _ in range(PCA_MAX_ITER):
        w = C @ v
        if V.size:
            w -= V @ (V.T @ w)
        norm = np.linalg.norm(w)
        if norm == 0:
            break
        w /= norm
        converged = np.linalg.norm(w - v) < PCA_TOLERANCE
        v = w
        if converged:
            break
    nonzero = np.flatnonzero(np.abs(v) > PCA_TOLERANCE)
    if nonzero.size and v[nonzero[0]] < 0:
        v = -v
    return v, float(v @ C @ v)


def pca2d(embeddings, return_components=False):
    """ projection onto the two leading principal components

    Parameters
    ----------
    embeddings : numpy.ndarray, size=(m,e)
        at least three embeddings of length two or more
    return_components : bool
        also give the components and their variances

    Returns
    -------
    coords : numpy.ndarray, size=(m,2)
        centered embeddings projected on the components
    components : numpy.ndarray, size=(2,e)
        unit vectors, the first non-zero entry of each is positive
    variances : numpy.ndarray, size=(2,)
        variance along each component, in decreasing order

    Notes
    -----
    The components are found by power iteration on the covariance matrix
    with deflation, starting from a fixed vector, so the outcome only
    depends on the input.
    """
    X = np.asarray(embeddings, dtype=np.float64)
    if X.ndim != 2 or X.shape[0] < 3 or X.shape[1] < 2:
        raise DimensionError('please provide three or more embeddings of '
                             f'length two or more, got {X.shape}')
    X_c = X - np.mean(X, axis=0)
    # the mean of identical rows is only exact up to round-off
    if np.max(np.abs(X_c)) <= 1e-12 * np.max(np.abs(X)):
        raise DegenerateInputError('all embeddings are identical')
    C = X_c.T @ X_c / X.shape[0]

    start = np.random.default_rng(0).normal(size=X.shape[1])
    V, variances = np.zeros((X.shape[1], 0)), []
    for _ in range(2):
        v, var = _power_iteration(C, V, start)
        V = np.column_stack((V, v))
        variances.append(var)
        C = C - var * np.outer(v, v)
    coords = X_c @ V
    if return_components:
        return coords, V.T, np.array(variances)
    return coords


def export_embeddings(params, ds, fname, pca=False):
    """ write the embedding of every sample to a comma separated file

    Parameters
    ----------
    params : ModelParams
    ds : LabeledDataset
        normalized with the training mean
    fname : string
        output path
    pca : bool
        add the columns px and py with the projection of `pca2d`

    Returns
    -------
    F : numpy.ndarray, size=(m,e)
        the written embeddings
    """
    if len(ds) == 0:
        F = np.zeros((0, params.embed_dim))
        coords = np.zeros((0, 2)) if pca else None
    else:
        F = embed(params, _network_input(params, ds))
        coords = pca2d(F) if pca else None
    write_embeddings(fname, np.arange(len(ds)), ds.labels, F, coords)
    return F
