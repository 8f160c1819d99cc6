""" classification loss, contrastive loss and their joint objective

Every function takes one pair (vectors) or a batch of pairs (arrays with one
pair per row) and then returns one value per row.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.special import log_softmax, softmax

from ..generic.unit_check import (are_two_arrays_equal, correct_class_index,
                                  correct_float_array,
                                  correct_positive_parameter,
                                  correct_trailing_dimension)

# below this distance the direction of a pair is undefined
DISTANCE_FLOOR = 1e-12


@dataclass
class PairLossBreakdown:
    """ the joint objective of a pair, split into its terms

    Attributes
    ----------
    loss_i, loss_j : {float, numpy.ndarray}
        cross-entropy of the first and second image
    contrastive : {float, numpy.ndarray}
        contrastive loss of the pair
    total : {float, numpy.ndarray}
        loss_i + loss_j + trade_off * contrastive
    same : {bool, numpy.ndarray}
        are both images of the same class
    """
    loss_i: float
    loss_j: float
    contrastive: float
    total: float
    same: bool

    @classmethod
    def from_terms(cls, loss_i, loss_j, contrastive, trade_off, same):
        total = loss_i + loss_j + trade_off * contrastive
        return cls(loss_i, loss_j, contrastive, total, same)


class JointGradients(NamedTuple):
    dL_dfi: np.ndarray
    dL_dfj: np.ndarray
    dL_dzi: np.ndarray
    dL_dzj: np.ndarray
    dL_dW: np.ndarray
    dL_db: np.ndarray


def _row_pick(A, c):
    if A.ndim == 1:
        return A[c]
    return A[np.arange(A.shape[0]), c]


def softmax_probs(z):
    """ class probabilities from logits

    Parameters
    ----------
    z : numpy.ndarray, size=(c,) or size=(n,c)
        logits

    Returns
    -------
    p : numpy.ndarray, size=(c,) or size=(n,c)
        probabilities, summing to one along the last axis

    Notes
    -----
    The maximum is subtracted before exponentiation, hence large logits do
    not overflow:

    .. math:: p_c = exp(z_c - max(z)) / Σ_k exp(z_k - max(z))
    """
    z = correct_float_array(z, name='logits')
    return softmax(z, axis=-1)


def cross_entropy(z, c):
    """ negative log-probability of the target class

    Parameters
    ----------
    z : numpy.ndarray, size=(c,) or size=(n,c)
        logits
    c : {integer, numpy.ndarray}
        target class(es)

    Returns
    -------
    loss : {float, numpy.ndarray}, range=0...∞
    """
    z = correct_float_array(z, name='logits')
    c = correct_class_index(c, z.shape[-1])
    loss = -_row_pick(log_softmax(z, axis=-1), c)
    return float(loss) if np.ndim(loss) == 0 else loss


def cross_entropy_logit_grad(z, c):
    """ gradient of the cross-entropy with respect to the logits

    Parameters
    ----------
    z : numpy.ndarray, size=(c,) or size=(n,c)
        logits
    c : {integer, numpy.ndarray}
        target class(es)

    Returns
    -------
    g : numpy.ndarray, size=(c,) or size=(n,c)
        p_k - 1 at the target class, p_k elsewhere
    """
    z = correct_float_array(z, name='logits')
    c = correct_class_index(c, z.shape[-1])
    g = softmax(z, axis=-1)
    if g.ndim == 1:
        g[c] -= 1.
    else:
        g[np.arange(g.shape[0]), c] -= 1.
    return g


def _pair_geometry(f_i, f_j, margin):
    f_i = correct_float_array(f_i, name='embedding')
    f_j = correct_float_array(f_j, name='embedding')
    are_two_arrays_equal(f_i, f_j, name='embeddings')
    margin = correct_positive_parameter(margin, 'margin')
    diff = f_i - f_j
    sq_dist = np.sum(diff * diff, axis=-1)
    return diff, sq_dist, np.sqrt(sq_dist), margin


def contrastive(f_i, f_j, same, margin=1.):
    """ contrastive loss of a pair of embeddings

    Parameters
    ----------
    f_i, f_j : numpy.ndarray, size=(e,) or size=(n,e)
        embeddings of both images
    same : {bool, numpy.ndarray}
        do the images share their class
    margin : float, {x ∈ ℝ | x > 0}
        distance beyond which different classes are no longer penalized

    Returns
    -------
    V : {float, numpy.ndarray}, range=0...∞

    Notes
    -----
    With d the Euclidean distance between the embeddings:

    .. math:: V = ½ d² (same),   V = ½ max(m - d, 0)² (different)
    """
    _, sq_dist, dist, margin = _pair_geometry(f_i, f_j, margin)
    hinge = np.maximum(margin - dist, 0.)
    V = np.where(same, .5 * sq_dist, .5 * hinge**2)
    return float(V) if np.ndim(V) == 0 else V


def contrastive_grad(f_i, f_j, same, margin=1.):
    """ gradient of the contrastive loss with respect to both embeddings

    Parameters
    ----------
    f_i, f_j : numpy.ndarray, size=(e,) or size=(n,e)
        embeddings of both images
    same : {bool, numpy.ndarray}
        do the images share their class
    margin : float, {x ∈ ℝ | x > 0}

    Returns
    -------
    dV_dfi, dV_dfj : numpy.ndarray, size=(e,) or size=(n,e)
        gradients, dV_dfj = -dV_dfi

    Notes
    -----
    For different classes the gradient is zero when the pair sits at least
    the margin apart (the hinge boundary included) and when both embeddings
    coincide, d < 1e-12, where no direction exists.
    """
    diff, _, dist, margin = _pair_geometry(f_i, f_j, margin)
    hinge = np.maximum(margin - dist, 0.)
    scale = np.zeros_like(dist)
    np.divide(-hinge, dist, out=scale, where=dist >= DISTANCE_FLOOR)
    scale = np.where(same, 1., scale)
    dV_dfi = scale[..., np.newaxis] * diff
    return dV_dfi, -dV_dfi


def _check_trade_off(trade_off):
    return correct_positive_parameter(trade_off, 'trade_off', strict=False)


def joint_loss(z_i, c_i, z_j, c_j, f_i, f_j, trade_off=1., margin=1.):
    """ joint objective of a pair: both classification losses plus the
    weighted contrastive loss

    Parameters
    ----------
    z_i, z_j : numpy.ndarray, size=(c,) or size=(n,c)
        logits of both images
    c_i, c_j : {integer, numpy.ndarray}
        their classes
    f_i, f_j : numpy.ndarray, size=(e,) or size=(n,e)
        their embeddings
    trade_off : float, {x ∈ ℝ | x ≥ 0}
        weight of the contrastive loss
    margin : float, {x ∈ ℝ | x > 0}

    Returns
    -------
    breakdown : PairLossBreakdown

    See Also
    --------
    joint_feature_grad
    """
    trade_off = _check_trade_off(trade_off)
    loss_i, loss_j = cross_entropy(z_i, c_i), cross_entropy(z_j, c_j)
    same = np.equal(c_i, c_j)
    if same.ndim == 0:
        same = bool(same)
    V = contrastive(f_i, f_j, same, margin)
    return PairLossBreakdown.from_terms(loss_i, loss_j, V, trade_off, same)


def joint_feature_grad(z_i, c_i, z_j, c_j, f_i, f_j, classifier_weights,
                       trade_off=1., margin=1.):
    """ gradients of the joint objective with respect to the embeddings, the
    logits and the classifier head

    Parameters
    ----------
    z_i, c_i, z_j, c_j, f_i, f_j :
        as in `joint_loss`
    classifier_weights : numpy.ndarray, size=(e,c)
        softmax weight matrix W, with z = Wᵀf + b
    trade_off : float, {x ∈ ℝ | x ≥ 0}
    margin : float, {x ∈ ℝ | x > 0}

    Returns
    -------
    grads : JointGradients
        dL_dfi, dL_dfj, dL_dzi, dL_dzj per pair; dL_dW and dL_db summed
        over both branches and, for a batch, over all pairs
    """
    trade_off = _check_trade_off(trade_off)
    W = np.asarray(classifier_weights, dtype=np.float64)
    f_i, f_j = np.asarray(f_i, dtype=float), np.asarray(f_j, dtype=float)
    correct_trailing_dimension(f_i, W.shape[0], name='embedding')

    dL_dzi = cross_entropy_logit_grad(z_i, c_i)
    dL_dzj = cross_entropy_logit_grad(z_j, c_j)
    correct_trailing_dimension(dL_dzi, W.shape[1], name='logits')

    same = np.equal(c_i, c_j)
    dV_dfi, dV_dfj = contrastive_grad(f_i, f_j, same, margin)

    dL_dfi = dL_dzi @ W.T + trade_off * dV_dfi
    dL_dfj = dL_dzj @ W.T + trade_off * dV_dfj

    if f_i.ndim == 1:
        dL_dW = np.outer(f_i, dL_dzi) + np.outer(f_j, dL_dzj)
        dL_db = dL_dzi + dL_dzj
    else:
        dL_dW = f_i.T @ dL_dzi + f_j.T @ dL_dzj
        dL_db = np.sum(dL_dzi, axis=0) + np.sum(dL_dzj, axis=0)
    return JointGradients(dL_dfi, dL_dfj, dL_dzi, dL_dzj, dL_dW, dL_db)
