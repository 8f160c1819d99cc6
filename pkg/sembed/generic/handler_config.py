""" training configuration and its key-value file

A configuration file holds one `key = value` per line, `#` starts a comment.
Recognized keys, with their defaults:

    lambda     = 1.0    weight of the contrastive loss, ≥ 0
    margin     = 1.0    contrastive margin, > 0
    lr         = 0.01   learning rate, ≥ 0
    epochs     = 50
    batch_size = 32     pairs per step
    seed       = 0
    layers     = 32     comma separated widths of the hidden dense layers,
                        empty for a single dense layer
    embed_dim  = 16     length of the embedding
    crop_side  = 0      crop size of the augmentation, 0 switches it off
"""
from __future__ import annotations

import configparser
from dataclasses import asdict, dataclass, replace

from .unit_check import (SembedError, SpecError, correct_positive_integer,
                         correct_positive_parameter)

# file key -> field name
CONFIG_KEYS = {
    'lambda': 'trade_off',
    'margin': 'margin',
    'lr': 'learning_rate',
    'epochs': 'epochs',
    'batch_size': 'batch_size',
    'seed': 'seed',
    'layers': 'layers',
    'embed_dim': 'embed_dim',
    'crop_side': 'crop_side',
}
_SECTION = 'train'


@dataclass(frozen=True)
class TrainConfig:
    trade_off: float = 1.
    margin: float = 1.
    learning_rate: float = .01
    epochs: int = 50
    batch_size: int = 32
    seed: int = 0
    layers: tuple = (32, )
    embed_dim: int = 16
    crop_side: int = 0

    def __post_init__(self):
        check_train_config(self)

    def updated(self, **kwargs):
        """ copy with some fields replaced, None values are ignored """
        kwargs = {k: v for k, v in kwargs.items() if v is not None}
        return replace(self, **kwargs)


def _parse_layers(value):
    if isinstance(value, str):
        value = [v for v in value.replace(' ', '').split(',') if v]
    return tuple(correct_positive_integer(v, 'layers') for v in value)


def check_train_config(cfg):
    """ enforce the ranges of all fields, in place

    Parameters
    ----------
    cfg : TrainConfig
    """
    fields = {
        'trade_off':
        correct_positive_parameter(cfg.trade_off, 'lambda', strict=False),
        'margin':
        correct_positive_parameter(cfg.margin, 'margin'),
        'learning_rate':
        correct_positive_parameter(cfg.learning_rate, 'lr', strict=False),
        'epochs':
        correct_positive_integer(cfg.epochs, 'epochs'),
        'batch_size':
        correct_positive_integer(cfg.batch_size, 'batch_size'),
        'layers':
        _parse_layers(cfg.layers),
        'embed_dim':
        correct_positive_integer(cfg.embed_dim, 'embed_dim'),
    }
    fields['seed'] = correct_positive_integer(cfg.seed, 'seed', strict=False)
    fields['crop_side'] = correct_positive_integer(cfg.crop_side, 'crop_side',
                                                   strict=False)
    for name, value in fields.items():
        object.__setattr__(cfg, name, value)
    return cfg


def read_config(fname=None, **overrides):
    """ read a training configuration

    Parameters
    ----------
    fname : string
        path to a key-value file, when None only the defaults are used
    overrides : dict
        field values that take precedence over the file, None is ignored

    Returns
    -------
    cfg : TrainConfig

    See Also
    --------
    write_config
    """
    values = {}
    if fname is not None:
        parser = configparser.ConfigParser(inline_comment_prefixes=('#', ),
                                           interpolation=None)
        try:
            with open(fname, 'r', encoding='utf-8') as f:
                parser.read_string(f'[{_SECTION}]\n' + f.read())
        except configparser.Error as err:
            raise SpecError(f'{fname} is no key-value file: {err}')
        for key, value in parser.items(_SECTION):
            if key not in CONFIG_KEYS:
                raise SpecError(f'unknown configuration key {key!r}')
            values[CONFIG_KEYS[key]] = value
    overrides = {k: v for k, v in overrides.items() if v is not None}
    values.update(overrides)
    try:
        return TrainConfig(**values)
    except TypeError as err:
        raise SpecError(str(err))
    except SembedError as err:
        raise SpecError(f'{fname}: {err}' if fname else str(err))


def write_config(fname, cfg):
    fields = asdict(cfg)
    with open(fname, 'w', encoding='utf-8', newline='\n') as f:
        for key, name in CONFIG_KEYS.items():
            value = fields[name]
            if name == 'layers':
                value = ','.join(str(v) for v in value)
            elif isinstance(value, float):
                value = repr(value)
            f.write(f'{key} = {value}\n')
    return
