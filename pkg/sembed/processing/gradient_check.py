""" compare the analytic gradients with central finite differences """
import logging
import warnings

import numpy as np

from ..generic.unit_check import (correct_positive_integer,
                                  correct_positive_parameter)
from .loss_tools import (contrastive, contrastive_grad, cross_entropy,
                         cross_entropy_logit_grad, joint_feature_grad,
                         joint_loss)
from .network_tools import (forward_features, forward_logits, init_params,
                            make_layer_specs)
from .training_tools import batch_gradients

logger = logging.getLogger(__name__)

# distances and relu inputs closer than this to a kink are redrawn
KINK_CLEARANCE = 1e-3
MAX_DRAWS = 100


def relative_error(analytic, numeric, floor=1e-8):
    """ ||a - n|| / max(||a||, ||n||, floor) with the Euclidean norm taken
    over all entries

    Parameters
    ----------
    analytic, numeric : numpy.ndarray
        two versions of the same gradient
    floor : float, {x ∈ ℝ | x > 0}
        smallest scale, two vanishing gradients agree

    Returns
    -------
    err : float
    """
    analytic = np.asarray(analytic, dtype=np.float64)
    numeric = np.asarray(numeric, dtype=np.float64)
    floor = correct_positive_parameter(floor, 'floor')
    scale = max(np.linalg.norm(analytic), np.linalg.norm(numeric), floor)
    return float(np.linalg.norm(analytic - numeric) / scale)


def numeric_gradient(func, A, eps=1e-5):
    """ central finite differences of a scalar function of an array

    Parameters
    ----------
    func : callable
        func(A) -> float
    A : numpy.ndarray
        point of evaluation, left untouched
    eps : float, {x ∈ ℝ | x > 0}
        step size

    Returns
    -------
    dA : numpy.ndarray, size=A.shape
    """
    eps = correct_positive_parameter(eps, 'eps')
    A = np.array(A, dtype=np.float64)
    dA = np.zeros_like(A)
    for idx in np.ndindex(A.shape):
        orig = A[idx]
        A[idx] = orig + eps
        f_pos = func(A)
        A[idx] = orig - eps
        f_neg = func(A)
        A[idx] = orig
        dA[idx] = (f_pos - f_neg) / (2 * eps)
    return dA


def _mean_joint_loss(params, X_i, c_i, X_j, c_j, trade_off, margin):
    f_i, f_j = forward_features(params, X_i)[0], forward_features(params,
                                                                  X_j)[0]
    z_i, z_j = forward_logits(params, f_i), forward_logits(params, f_j)
    terms = joint_loss(z_i, c_i, z_j, c_j, f_i, f_j, trade_off, margin)
    return float(np.mean(terms.total))


def _near_relu_kink(params, X):
    _, trace = forward_features(params, X)
    for la, a in zip(params.layers, trace.inputs):
        if la.kind == 'relu' and np.min(np.abs(a)) < KINK_CLEARANCE:
            return True
    return False


def draw_check_problem(seed, in_dim=5, hidden=(6, 5), embed_dim=3,
                       n_classes=4):
    """ random network with one same-class and one different-class pair

    Returns
    -------
    problem : dict
        with the keys params, X_i, c_i, X_j, c_j, trade_off and margin

    Notes
    -----
    The margin is set to twice the distance of the different-class pair, so
    its hinge is active and both kinks of the contrastive loss are far away.
    Inputs are redrawn while a relu sees a value close to zero.
    """
    seed = correct_positive_integer(seed, 'seed', strict=False)
    rng = np.random.default_rng(seed)
    layers = make_layer_specs(in_dim, hidden, embed_dim)
    params = init_params(layers, n_classes, rng)
    # non-zero biases, so the head is fully exercised
    params = params.with_arrays([
        A if A.ndim == 2 else rng.normal(scale=.1, size=A.shape)
        for A in params.arrays()
    ])
    c_same = rng.integers(n_classes)
    c_a, c_b = rng.choice(n_classes, size=2, replace=False)
    c_i, c_j = np.array([c_same, c_a]), np.array([c_same, c_b])

    for _ in range(MAX_DRAWS):
        X_i = rng.normal(size=(2, in_dim))
        X_j = rng.normal(size=(2, in_dim))
        f_i, f_j = forward_features(params, X_i)[0], forward_features(params,
                                                                      X_j)[0]
        d_diff = np.linalg.norm(f_i[1] - f_j[1])
        if d_diff > KINK_CLEARANCE and not (_near_relu_kink(params, X_i) or
                                            _near_relu_kink(params, X_j)):
            break
    else:
        warnings.warn(f'seed {seed}: no draw clear of every kink, checking '
                      'the last one')
    return dict(params=params, X_i=X_i, c_i=c_i, X_j=X_j, c_j=c_j,
                trade_off=rng.uniform(.5, 2.), margin=2. * d_diff)


def gradient_check(seed, eps=1e-5, return_errors=False):
    """ largest relative deviation between analytic and numeric gradients

    Parameters
    ----------
    seed : integer, {x ∈ ℕ | x ≥ 0}
        seed of the random problem, see `draw_check_problem`
    eps : float, {x ∈ ℝ | x > 0}
        step of the central differences
    return_errors : bool
        also give the error per checked quantity

    Returns
    -------
    max_error : float
        largest `relative_error` over every checked gradient
    errors : dict
        only when `return_errors` is True, keys are 'logits',
        'contrastive', 'embedding' and the parameter names 'dense_W{k}',
        'dense_b{k}', 'classifier_W', 'classifier_b'

    Notes
    -----
    Checked are the gradient of the cross-entropy towards the logits, of the
    contrastive loss towards both embeddings, of the joint loss towards both
    embeddings and, through the whole network, of the batch-mean joint loss
    towards every parameter.
    """
    prob = draw_check_problem(seed)
    params, lam, m = prob['params'], prob['trade_off'], prob['margin']
    X_i, c_i, X_j, c_j = prob['X_i'], prob['c_i'], prob['X_j'], prob['c_j']
    errors = {}

    f_i, f_j = forward_features(params, X_i)[0], forward_features(params,
                                                                  X_j)[0]
    z_i, z_j = forward_logits(params, f_i), forward_logits(params, f_j)
    same = c_i == c_j

    err = 0.
    for z, c in zip(z_i, c_i):
        err = max(err, relative_error(
            cross_entropy_logit_grad(z, c),
            numeric_gradient(lambda A: cross_entropy(A, c), z, eps)))
    errors['logits'] = err

    err = 0.
    for a, b, s in zip(f_i, f_j, same):
        dV_di, dV_dj = contrastive_grad(a, b, s, m)
        err = max(
            err,
            relative_error(dV_di, numeric_gradient(
                lambda A: contrastive(A, b, s, m), a, eps)),
            relative_error(dV_dj, numeric_gradient(
                lambda A: contrastive(a, A, s, m), b, eps)))
    errors['contrastive'] = err

    W, b = params.classifier_weights, params.classifier_bias
    jg = joint_feature_grad(z_i, c_i, z_j, c_j, f_i, f_j, W, lam, m)

    def _joint(A, B):
        return float(np.sum(joint_loss(A @ W + b, c_i, B @ W + b, c_j, A, B,
                                       lam, m).total))

    errors['embedding'] = max(
        relative_error(jg.dL_dfi,
                       numeric_gradient(lambda A: _joint(A, f_j), f_i, eps)),
        relative_error(jg.dL_dfj,
                       numeric_gradient(lambda A: _joint(f_i, A), f_j, eps)))

    _, grads = batch_gradients(params, X_i, c_i, X_j, c_j, lam, m)
    arrays = params.arrays()
    n_dense = len(params.extractor_layers)
    names = [f'dense_{t}{k}' for k in range(n_dense) for t in ('W', 'b')]
    names += ['classifier_W', 'classifier_b']
    for k, (name, analytic) in enumerate(zip(names, grads.arrays())):

        def _loss(A):
            trial = list(arrays)
            trial[k] = A
            return _mean_joint_loss(params.with_arrays(trial), X_i, c_i, X_j,
                                    c_j, lam, m)

        errors[name] = relative_error(analytic,
                                      numeric_gradient(_loss, arrays[k], eps))

    max_error = max(errors.values())
    logger.info('seed %d: largest relative gradient error %.3e', seed,
                max_error)
    if return_errors:
        return max_error, errors
    return max_error
