""" dense feed-forward feature extractor with a linear classifier head

The extractor maps an input vector x onto an embedding f, the head maps f
onto class logits z = Wᵀf + b. Both siamese branches call the very same
functions with the very same ModelParams, so weight sharing is a matter of
passing one object around.

All functions accept a single sample, as a vector, or a batch, as an array
with one sample per row. For batches the weight gradients are summed over
the rows.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..generic.unit_check import (ConsistencyError, DimensionError,
                                  DomainError, SpecError, correct_float_array,
                                  correct_positive_integer,
                                  correct_trailing_dimension, is_finite_array)

LAYER_KINDS = ('dense', 'relu')


@dataclass(frozen=True)
class LayerSpec:
    kind: str
    in_dim: int
    out_dim: int = None

    def __post_init__(self):
        if self.kind not in LAYER_KINDS:
            raise SpecError(f'unknown layer kind {self.kind!r}')
        object.__setattr__(self, 'in_dim',
                           correct_positive_integer(self.in_dim, 'in_dim'))
        if self.kind == 'relu':
            if self.out_dim not in (None, self.in_dim):
                raise SpecError('a relu layer keeps its dimension')
            object.__setattr__(self, 'out_dim', self.in_dim)
        else:
            object.__setattr__(
                self, 'out_dim',
                correct_positive_integer(self.out_dim, 'out_dim'))


@dataclass
class ModelParams:
    """ all learnable parameters

    Attributes
    ----------
    layers : list of LayerSpec
        architecture of the feature extractor
    extractor_layers : list of tuple
        (weights, bias) for every dense layer, weights have size=(in,out)
    classifier_weights : numpy.ndarray, size=(e,c)
        softmax weight matrix
    classifier_bias : numpy.ndarray, size=(c,)
        softmax bias
    """
    layers: list
    extractor_layers: list
    classifier_weights: np.ndarray
    classifier_bias: np.ndarray = field(default=None)

    def __post_init__(self):
        if self.classifier_bias is None:
            self.classifier_bias = np.zeros(self.classifier_weights.shape[1])
        check_params(self)

    @property
    def in_dim(self):
        return self.layers[0].in_dim

    @property
    def embed_dim(self):
        return self.layers[-1].out_dim

    @property
    def n_classes(self):
        return self.classifier_bias.size

    def arrays(self):
        """ every parameter tensor, in a fixed order """
        out = []
        for W, b in self.extractor_layers:
            out += [W, b]
        return out + [self.classifier_weights, self.classifier_bias]

    def with_arrays(self, arrays):
        """ new parameter set of the same architecture, from a list as
        returned by `arrays` """
        arrays = list(arrays)
        n_dense = len(self.extractor_layers)
        if len(arrays) != 2 * n_dense + 2:
            raise DimensionError('wrong number of parameter tensors')
        for old, new in zip(self.arrays(), arrays):
            are_shapes_equal(old, new)
        extractor = [(arrays[2 * k], arrays[2 * k + 1])
                     for k in range(n_dense)]
        return ModelParams(list(self.layers), extractor, arrays[-2],
                           arrays[-1])

    def copy(self):
        return self.with_arrays([A.copy() for A in self.arrays()])

    def zeros_like(self):
        return self.with_arrays([np.zeros_like(A) for A in self.arrays()])


@dataclass
class ForwardTrace:
    """ per layer, the array going in and the array coming out """
    inputs: list
    outputs: list

    def __len__(self):
        return len(self.inputs)


def are_shapes_equal(A, B):
    if np.shape(A) != np.shape(B):
        raise DimensionError(f'parameter shapes differ: {np.shape(A)} and '
                             f'{np.shape(B)}')
    return


def make_layer_specs(in_dim, hidden=(32, ), embed_dim=16):
    """ stack of dense+relu blocks, closed by a dense embedding layer

    Parameters
    ----------
    in_dim : integer, {x ∈ ℕ | x ≥ 1}
        length of the (flattened) input
    hidden : tuple of integers
        widths of the hidden dense layers, each followed by a relu
    embed_dim : integer, {x ∈ ℕ | x ≥ 1}
        length of the embedding f

    Returns
    -------
    layers : list of LayerSpec
    """
    layers, dim = [], in_dim
    for width in hidden:
        layers.append(LayerSpec('dense', dim, width))
        layers.append(LayerSpec('relu', width))
        dim = width
    layers.append(LayerSpec('dense', dim, embed_dim))
    return check_layer_specs(layers)


def check_layer_specs(layers):
    if len(layers) == 0:
        raise SpecError('please provide at least one layer')
    for k in range(1, len(layers)):
        if layers[k - 1].out_dim != layers[k].in_dim:
            raise SpecError(f'layer {k} expects {layers[k].in_dim} inputs, '
                            f'layer {k - 1} gives {layers[k - 1].out_dim}')
    if layers[-1].kind != 'dense':
        raise SpecError('the last layer of the extractor should be dense')
    return layers


def check_params(params):
    check_layer_specs(params.layers)
    dense = [la for la in params.layers if la.kind == 'dense']
    if len(dense) != len(params.extractor_layers):
        raise ConsistencyError(f'{len(dense)} dense layers, but '
                               f'{len(params.extractor_layers)} weight sets')
    for k, (la, (W, b)) in enumerate(zip(dense, params.extractor_layers)):
        if np.shape(W) != (la.in_dim, la.out_dim) or \
                np.shape(b) != (la.out_dim, ):
            raise DimensionError(f'dense layer {k} should have weights of '
                                 f'{(la.in_dim, la.out_dim)}, got '
                                 f'{np.shape(W)} and bias {np.shape(b)}')
    W, b = params.classifier_weights, params.classifier_bias
    if W.ndim != 2 or W.shape[0] != params.embed_dim:
        raise DimensionError(f'classifier weights of {W.shape} do not fit an '
                             f'embedding of {params.embed_dim}')
    if b.shape != (W.shape[1], ):
        raise DimensionError(f'classifier bias of {b.shape} does not fit '
                             f'{W.shape[1]} classes')
    return


def init_params(layers, n_classes, rng=None):
    """ draw an initial parameter set

    Parameters
    ----------
    layers : list of LayerSpec
        architecture of the feature extractor
    n_classes : integer, {x ∈ ℕ | x ≥ 1}
        number of classes of the softmax head
    rng : {numpy.random.Generator, integer, None}
        random generator, or seed for one

    Returns
    -------
    params : ModelParams

    Notes
    -----
    Weights are uniform on [-s, +s] with s = sqrt(6 / (in + out)), biases
    start at zero. The generator is consumed layer by layer, the classifier
    comes last.
    """
    layers = check_layer_specs(list(layers))
    n_classes = correct_positive_integer(n_classes, 'n_classes')
    rng = np.random.default_rng(rng)

    def _uniform(n_in, n_out):
        s = np.sqrt(6. / (n_in + n_out))
        return rng.uniform(low=-s, high=+s, size=(n_in, n_out))

    extractor = [(_uniform(la.in_dim, la.out_dim), np.zeros(la.out_dim))
                 for la in layers if la.kind == 'dense']
    embed_dim = layers[-1].out_dim
    return ModelParams(layers, extractor, _uniform(embed_dim, n_classes),
                       np.zeros(n_classes))


def forward_features(params, x):
    """ feature extraction, f = C(x, θc)

    Parameters
    ----------
    params : ModelParams
        shared parameter set
    x : numpy.ndarray, size=(d,) or size=(n,d)
        flattened input(s)

    Returns
    -------
    f : numpy.ndarray, size=(e,) or size=(n,e)
        embedding(s)
    trace : ForwardTrace
        intermediate arrays, needed by `backward`

    See Also
    --------
    backward
    """
    a = correct_float_array(x, name='input')
    inputs, outputs = [], []
    dense = iter(params.extractor_layers)
    for k, la in enumerate(params.layers):
        if a.shape[-1] != la.in_dim:
            raise DimensionError(f'layer {k} ({la.kind}) expects '
                                 f'{la.in_dim} inputs, got {a.shape[-1]}')
        if la.kind == 'dense':
            W, b = next(dense)
            out = a @ W + b
        else:
            out = np.maximum(a, 0.)
        inputs.append(a)
        outputs.append(out)
        a = out
    if not is_finite_array(a):
        raise DomainError('feature extraction produced non-finite values')
    return a, ForwardTrace(inputs, outputs)


def embed(params, X):
    return forward_features(params, X)[0]


def forward_logits(params, f):
    """ classifier head, z = Wᵀf + b

    Parameters
    ----------
    params : ModelParams
    f : numpy.ndarray, size=(e,) or size=(n,e)
        embedding(s)

    Returns
    -------
    z : numpy.ndarray, size=(c,) or size=(n,c)
        logits
    """
    f = np.asarray(f, dtype=np.float64)
    correct_trailing_dimension(f, params.embed_dim, name='embedding')
    return f @ params.classifier_weights + params.classifier_bias


def backward(params, trace, dL_df, return_input_grad=False):
    """ chain rule through the extractor

    Parameters
    ----------
    params : ModelParams
        parameters used for the forward pass
    trace : ForwardTrace
        as returned by `forward_features` on the same parameters
    dL_df : numpy.ndarray, size=(e,) or size=(n,e)
        gradient of the loss with respect to the embedding(s)
    return_input_grad : bool
        also give the gradient with respect to the input

    Returns
    -------
    grads : ModelParams
        gradient for every tensor; the classifier entries are zero, as the
        head is not part of the extractor
    dL_dx : numpy.ndarray
        only when `return_input_grad` is True

    Notes
    -----
    The relu uses the subgradient 0 at an input of exactly 0.
    """
    if len(trace) != len(params.layers):
        raise ConsistencyError(f'trace has {len(trace)} layers, the '
                               f'network {len(params.layers)}')
    for k, (la, a) in enumerate(zip(params.layers, trace.inputs)):
        if a.shape[-1] != la.in_dim:
            raise ConsistencyError(f'trace of layer {k} does not belong to '
                                   f'these parameters')
    g = np.asarray(dL_df, dtype=np.float64)
    if g.shape != trace.outputs[-1].shape:
        raise DimensionError(f'upstream gradient of {g.shape} does not fit '
                             f'the embedding of {trace.outputs[-1].shape}')

    n_dense = len(params.extractor_layers)
    dense_grads = [None] * n_dense
    k = n_dense
    for la, a in zip(reversed(params.layers), reversed(trace.inputs)):
        if la.kind == 'relu':
            g = g * (a > 0.)
            continue
        k -= 1
        W = params.extractor_layers[k][0]
        if g.ndim == 1:
            dW, db = np.outer(a, g), g.copy()
        else:
            dW, db = a.T @ g, np.sum(g, axis=0)
        dense_grads[k] = (dW, db)
        g = g @ W.T

    grads = ModelParams(list(params.layers), dense_grads,
                        np.zeros_like(params.classifier_weights),
                        np.zeros_like(params.classifier_bias))
    if return_input_grad:
        return grads, g
    return grads


def predict_classes(params, X):
    """ most likely class of every sample, ties go to the lowest index

    Parameters
    ----------
    params : ModelParams
    X : numpy.ndarray, size=(d,) or size=(n,d)

    Returns
    -------
    c : {integer, numpy.ndarray}
    """
    z = forward_logits(params, embed(params, X))
    return np.argmax(z, axis=-1)
