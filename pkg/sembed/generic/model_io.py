""" model checkpoint in the netCDF classic format

Layout of a checkpoint file:

    global attributes
        format_version : 1
        layer_kinds    : comma separated kinds, e.g.: "dense,relu,dense"
        layer_in_dims  : integers, input length of every layer
        layer_out_dims : integers, output length of every layer
        n_classes      : integer
        embed_dim      : integer
        trade_off      : weight of the contrastive loss used in training
        margin         : contrastive margin used in training
    variables (float64)
        dense_W{k} (dense{k}_in, dense{k}_out), dense_b{k} (dense{k}_out)
            weights and bias of the k-th dense layer, counting from zero
        classifier_W (embed, classes), classifier_b (classes)
        input_mean (input), optional
            training mean to subtract from raw inputs

The classic format carries no time stamps, thus writing the same model twice
gives identical files.
"""
import numpy as np
from netCDF4 import Dataset

from ..processing.network_tools import LayerSpec, ModelParams
from .unit_check import ParseError

FORMAT_VERSION = 1
NC_FORMAT = 'NETCDF3_64BIT_OFFSET'


def save_model(fname, params, mean=None, trade_off=None, margin=None):
    """ write a parameter set, and optionally its input mean, to disk

    Parameters
    ----------
    fname : string
        output path
    params : ModelParams
    mean : numpy.ndarray, size=(d,)
        training mean subtracted from the inputs
    trade_off, margin : float
        hyperparameters of the training run, stored for reference

    See Also
    --------
    load_model
    """
    with Dataset(fname, 'w', format=NC_FORMAT) as dsout:
        dsout.format_version = np.int32(FORMAT_VERSION)
        dsout.layer_kinds = ','.join(la.kind for la in params.layers)
        dsout.layer_in_dims = np.array(
            [la.in_dim for la in params.layers], dtype=np.int32)
        dsout.layer_out_dims = np.array(
            [la.out_dim for la in params.layers], dtype=np.int32)
        dsout.n_classes = np.int32(params.n_classes)
        dsout.embed_dim = np.int32(params.embed_dim)
        if trade_off is not None:
            dsout.trade_off = np.float64(trade_off)
        if margin is not None:
            dsout.margin = np.float64(margin)

        for k, (W, b) in enumerate(params.extractor_layers):
            d_in = dsout.createDimension(f'dense{k}_in', W.shape[0])
            d_out = dsout.createDimension(f'dense{k}_out', W.shape[1])
            var = dsout.createVariable(f'dense_W{k}', 'f8',
                                       (d_in.name, d_out.name))
            var[:] = W
            var = dsout.createVariable(f'dense_b{k}', 'f8', (d_out.name, ))
            var[:] = b

        dsout.createDimension('embed', params.embed_dim)
        dsout.createDimension('classes', params.n_classes)
        var = dsout.createVariable('classifier_W', 'f8', ('embed', 'classes'))
        var[:] = params.classifier_weights
        var = dsout.createVariable('classifier_b', 'f8', ('classes', ))
        var[:] = params.classifier_bias

        if mean is not None:
            mean = np.asarray(mean, dtype=np.float64)
            dsout.createDimension('input', mean.size)
            var = dsout.createVariable('input_mean', 'f8', ('input', ))
            var[:] = mean
    return


def _read_array(dsin, name):
    if name not in dsin.variables:
        raise ParseError(f'checkpoint misses the variable {name!r}')
    return np.array(dsin.variables[name][:], dtype=np.float64)


def load_model(fname):
    """ read a checkpoint written by `save_model`

    Parameters
    ----------
    fname : string
        path to the checkpoint

    Returns
    -------
    params : ModelParams
    meta : dict
        with the keys 'mean' (None when absent), 'trade_off' and 'margin'
        (None when absent)
    """
    try:
        dsin = Dataset(fname, 'r')
    except OSError as err:
        raise ParseError(f'{fname} is no readable checkpoint ({err})')
    with dsin:
        dsin.set_auto_mask(False)
        attrs = {k: dsin.getncattr(k) for k in dsin.ncattrs()}
        if int(attrs.get('format_version', -1)) != FORMAT_VERSION:
            raise ParseError(f'{fname} has an unknown checkpoint version')
        kinds = str(attrs['layer_kinds']).split(',')
        in_dims = np.atleast_1d(attrs['layer_in_dims'])
        out_dims = np.atleast_1d(attrs['layer_out_dims'])
        layers = [
            LayerSpec(kind, int(d_in), int(d_out))
            for kind, d_in, d_out in zip(kinds, in_dims, out_dims)
        ]
        n_dense = sum(la.kind == 'dense' for la in layers)
        extractor = [(_read_array(dsin, f'dense_W{k}'),
                      _read_array(dsin, f'dense_b{k}'))
                     for k in range(n_dense)]
        params = ModelParams(layers, extractor,
                             _read_array(dsin, 'classifier_W'),
                             _read_array(dsin, 'classifier_b'))
        meta = {
            'mean': _read_array(dsin, 'input_mean')
            if 'input_mean' in dsin.variables else None,
            'trade_off': float(attrs['trade_off'])
            if 'trade_off' in attrs else None,
            'margin': float(attrs['margin']) if 'margin' in attrs else None,
        }
    return params, meta
