""" stochastic gradient descent over batches of image pairs """
import logging

import numpy as np
import pandas as pd

from ..generic.data_io import LOG_COLUMNS
from ..generic.unit_check import (DimensionError, DivergedError, DomainError,
                                  correct_positive_parameter)
from ..preprocessing.image_transforms import (augment_batch, get_image_side,
                                              match_input_size)
from .loss_tools import joint_feature_grad, joint_loss
from .network_tools import (ModelParams, are_shapes_equal, backward,
                            forward_features, forward_logits, init_params,
                            make_layer_specs, predict_classes)
from .pairing_tools import check_pairable, sample_pairs

logger = logging.getLogger(__name__)


def sgd_step(params, grads, learning_rate):
    """ plain gradient descent update, p ← p - η·g

    Parameters
    ----------
    params : ModelParams
        current parameters, left untouched
    grads : {ModelParams, list of numpy.ndarray}
        gradient for every tensor, in the order of `ModelParams.arrays`
    learning_rate : float, {x ∈ ℝ | x ≥ 0}

    Returns
    -------
    params : ModelParams
        updated copy
    """
    learning_rate = correct_positive_parameter(learning_rate, 'learning_rate',
                                               strict=False)
    if isinstance(grads, ModelParams):
        grads = grads.arrays()
    grads = [np.asarray(g, dtype=np.float64) for g in grads]
    arrays = params.arrays()
    if len(grads) != len(arrays):
        raise DimensionError(f'{len(grads)} gradients for {len(arrays)} '
                             f'parameter tensors')
    for p, g in zip(arrays, grads):
        are_shapes_equal(p, g)
    return params.with_arrays(
        [p - learning_rate * g for p, g in zip(arrays, grads)])


def get_steps_per_epoch(n_samples, batch_size):
    """ a batch of k pairs covers 2k images """
    return int(np.ceil(n_samples / (2 * batch_size)))


def get_network_input_dim(ds, crop_side=0):
    if crop_side > 0:
        get_image_side(ds)
        return crop_side**2
    return ds.dim


def batch_gradients(params, X_i, c_i, X_j, c_j, trade_off=1., margin=1.):
    """ loss and gradient of the joint objective, averaged over a batch

    Parameters
    ----------
    params : ModelParams
        shared parameter set, read by both branches
    X_i, X_j : numpy.ndarray, size=(k,d)
        first and second image of every pair
    c_i, c_j : numpy.ndarray, size=(k,), dtype=int
        their labels
    trade_off : float
        weight of the contrastive loss
    margin : float

    Returns
    -------
    terms : PairLossBreakdown
        per pair
    grads : ModelParams
        gradient of the mean joint loss for every tensor

    Notes
    -----
    The upstream gradient is divided by the batch size before it enters the
    extractor, the gradients of both branches are then summed.
    """
    f_i, trace_i = forward_features(params, X_i)
    f_j, trace_j = forward_features(params, X_j)
    z_i, z_j = forward_logits(params, f_i), forward_logits(params, f_j)

    terms = joint_loss(z_i, c_i, z_j, c_j, f_i, f_j, trade_off, margin)
    jg = joint_feature_grad(z_i, c_i, z_j, c_j, f_i, f_j,
                            params.classifier_weights, trade_off, margin)

    n = f_i.shape[0]
    grads_i = backward(params, trace_i, jg.dL_dfi / n)
    grads_j = backward(params, trace_j, jg.dL_dfj / n)
    arrays = [g_i + g_j for g_i, g_j in zip(grads_i.arrays(),
                                            grads_j.arrays())]
    arrays[-2], arrays[-1] = jg.dL_dW / n, jg.dL_db / n
    return terms, params.with_arrays(arrays)


def train(ds, cfg, params=None):
    """ fit a siamese network on a labelled dataset

    Parameters
    ----------
    ds : LabeledDataset
        training data, already normalized
    cfg : TrainConfig
        hyperparameters
    params : ModelParams
        starting point, by default drawn from the seeded generator

    Returns
    -------
    params : ModelParams
        final parameters
    log : pandas.DataFrame
        one row per epoch with the columns epoch, total, cls, contrastive and
        acc; the losses are means over the steps of that epoch, `cls` holds
        the summed cross-entropy of both images, `acc` the accuracy on the
        full training set at the end of the epoch

    Raises
    ------
    DivergedError
        when a loss turns non-finite

    Notes
    -----
    One generator, seeded by `cfg.seed`, is consumed in a fixed order: the
    initialization, then per step the pair batch followed by the
    augmentation of the first and of the second images. Hence a run is
    reproducible down to the last bit.
    """
    check_pairable(ds.labels, ds.n_classes)
    rng = np.random.default_rng(cfg.seed)
    in_dim = get_network_input_dim(ds, cfg.crop_side)
    if params is None:
        layers = make_layer_specs(in_dim, cfg.layers, cfg.embed_dim)
        params = init_params(layers, ds.n_classes, rng)
    side = get_image_side(ds) if cfg.crop_side > 0 else None
    X_eval = match_input_size(ds, in_dim)

    n_steps = get_steps_per_epoch(len(ds), cfg.batch_size)
    records = []
    for epoch in range(cfg.epochs):
        sums = np.zeros(3)
        for step in range(n_steps):
            batch = sample_pairs(ds, cfg.batch_size, rng)
            X_i = ds.features[batch.idx_a]
            X_j = ds.features[batch.idx_b]
            if side is not None:
                X_i = augment_batch(X_i, side, cfg.crop_side, rng)
                X_j = augment_batch(X_j, side, cfg.crop_side, rng)
            try:
                terms, grads = batch_gradients(
                    params, X_i, ds.labels[batch.idx_a], X_j,
                    ds.labels[batch.idx_b], cfg.trade_off, cfg.margin)
            except DomainError as err:
                raise DivergedError(epoch, step, np.nan) from err
            total = np.mean(terms.total)
            if not np.isfinite(total):
                raise DivergedError(epoch, step, total)
            sums += [total, np.mean(terms.loss_i + terms.loss_j),
                     np.mean(terms.contrastive)]
            params = sgd_step(params, grads, cfg.learning_rate)

        try:
            acc = np.mean(predict_classes(params, X_eval) == ds.labels)
        except DomainError as err:
            raise DivergedError(epoch, n_steps - 1, np.nan) from err
        total, cls, contr = sums / n_steps
        records.append((epoch + 1, total, cls, contr, acc))
        logger.info('epoch %d/%d: loss %.6f (cls %.6f, contrastive %.6f), '
                    'training accuracy %.4f', epoch + 1, cfg.epochs, total,
                    cls, contr, acc)
    return params, pd.DataFrame(records, columns=list(LOG_COLUMNS))
