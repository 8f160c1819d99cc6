""" command-line interface, `sembed <command> [flags]`

Commands: gen-data, train, eval, gradcheck, sweep-lambda and
export-embeddings. Progress goes to standard error, results only to the
files given by the flags. Exit codes: 0 on success, 1 on a usage error and
2 on a runtime error.
"""
import argparse
import logging
import sys

from .__version__ import __version__
from .generic.data_io import (load_csv, save_csv, write_log, write_metrics,
                              write_sweep)
from .generic.handler_config import read_config
from .generic.model_io import load_model, save_model
from .generic.unit_check import DimensionError, SembedError
from .postprocessing.embedding_statistics import (evaluate, export_embeddings,
                                                  knn_accuracy, pca2d)
from .postprocessing.sweep_tools import lambda_sweep
from .preprocessing.image_transforms import normalize_mean
from .presentation.embedding_tools import make_embedding_figure
from .processing.gradient_check import gradient_check
from .processing.training_tools import train
from .testing.dataset_tools import (SYNTHETIC_MODES, SyntheticSpec,
                                    gen_synthetic)

logger = logging.getLogger('sembed')

GRADCHECK_TOLERANCE = 1e-5
EXIT_USAGE, EXIT_RUNTIME = 1, 2


class UsageError(Exception):
    pass


class ArgumentParser(argparse.ArgumentParser):
    """ reports a usage error on a single line, and leaves the exiting to
    `run` """

    def error(self, message):
        raise UsageError(f'{self.prog}: error: {message}')


def _float_list(value):
    try:
        return [float(v) for v in value.split(',') if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f'{value!r} is no list of numbers')


def _int_list(value):
    try:
        return [int(v) for v in value.split(',') if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f'{value!r} is no list of integers')


def _apply_mean(ds, mean):
    if mean is None:
        return ds
    if mean.size != ds.dim:
        raise DimensionError(f'the model expects samples of length '
                             f'{mean.size}, the data has {ds.dim}')
    return ds.with_features(ds.features - mean, mean=mean)


def gen_data(args):
    spec = SyntheticSpec(mode=args.mode, n_classes=args.classes,
                         per_class=args.per_class, dim=args.dim,
                         side=args.side, spread=args.spread,
                         separation=args.separation, seed=args.seed)
    ds = gen_synthetic(spec)
    save_csv(ds, args.out)
    logger.info('wrote %d samples of length %d to %s', len(ds), ds.dim,
                args.out)
    return 0


def train_model(args):
    cfg = read_config(args.config, trade_off=args.trade_off,
                      margin=args.margin, learning_rate=args.lr,
                      epochs=args.epochs, batch_size=args.batch,
                      seed=args.seed)
    ds, _, mean = normalize_mean(load_csv(args.data))
    params, log = train(ds, cfg)
    save_model(args.out_model, params, mean=mean, trade_off=cfg.trade_off,
               margin=cfg.margin)
    if args.log is not None:
        write_log(args.log, log)
    logger.info('final training accuracy %.4f, model written to %s',
                log['acc'].iloc[-1], args.out_model)
    return 0


def eval_model(args):
    params, meta = load_model(args.model)
    margin = args.margin
    if margin is None:
        margin = meta['margin'] if meta['margin'] is not None else 1.
    ds = _apply_mean(load_csv(args.data), meta['mean'])
    metrics = evaluate(params, ds, margin).as_dict()
    logger.info('accuracy %.4f, separability %.4f', metrics['accuracy'],
                metrics['separability'])
    if args.knn_reference is not None:
        ds_ref = _apply_mean(load_csv(args.knn_reference), meta['mean'])
        metrics['knn_accuracy'] = knn_accuracy(params, ds_ref, ds, k=args.k)
        logger.info('%d-nearest neighbour accuracy %.4f', args.k,
                    metrics['knn_accuracy'])
    write_metrics(args.out, metrics)
    return 0


def check_gradients(args):
    max_error = gradient_check(args.seed, eps=args.eps)
    print(f'{max_error:.6e}')
    if max_error < GRADCHECK_TOLERANCE:
        return 0
    logger.error('relative gradient error %.3e exceeds %.0e', max_error,
                 GRADCHECK_TOLERANCE)
    return EXIT_RUNTIME


def sweep_lambda(args):
    cfg = read_config(args.config)
    ds_train, (ds_test, ), _ = normalize_mean(load_csv(args.train),
                                              [load_csv(args.test)])
    table = lambda_sweep(ds_train, ds_test, cfg, args.lambdas, args.seeds,
                         n_jobs=args.jobs)
    failed = table[table['error'] != '']
    for lam, seed, err in zip(failed['lambda'], failed['seed'],
                              failed['error']):
        logger.warning('lambda=%g, seed=%d failed, written as nan: %s',
                       lam, seed, err)
    write_sweep(args.out, table)
    return 0


def export_model_embeddings(args):
    params, meta = load_model(args.model)
    ds = _apply_mean(load_csv(args.data), meta['mean'])
    F = export_embeddings(params, ds, args.out, pca=args.pca2d)
    logger.info('wrote %d embeddings to %s', len(ds), args.out)
    if args.plot is not None:
        make_embedding_figure(pca2d(F), ds.labels, args.plot)
        logger.info('projection plotted in %s', args.plot)
    return 0


def parse_args(args=None):
    parser = ArgumentParser(prog='sembed')
    parser.add_argument('--version', action='version',
                        version=f'%(prog)s {__version__}')
    subparsers = parser.add_subparsers(dest='command', required=True)

    gen_parser = subparsers.add_parser(
        'gen-data', help='generate a synthetic dataset')
    gen_parser.add_argument('--mode', choices=SYNTHETIC_MODES,
                            default='blobs')
    gen_parser.add_argument('--classes', type=int, default=8)
    gen_parser.add_argument('--per-class', type=int, default=100)
    gen_parser.add_argument('--dim', type=int, default=16,
                            help='sample length of blobs')
    gen_parser.add_argument('--side', type=int, default=16,
                            help='image side of textures')
    gen_parser.add_argument('--spread', type=float, default=.5)
    gen_parser.add_argument('--separation', type=float, default=4.)
    gen_parser.add_argument('--seed', type=int, default=0)
    gen_parser.add_argument('--out', required=True)
    gen_parser.set_defaults(run=gen_data)

    train_parser = subparsers.add_parser(
        'train', help='train a model, flags override the config file')
    train_parser.add_argument('--data', required=True)
    train_parser.add_argument('--config')
    train_parser.add_argument('--lambda', dest='trade_off', type=float)
    train_parser.add_argument('--margin', type=float)
    train_parser.add_argument('--lr', type=float)
    train_parser.add_argument('--epochs', type=int)
    train_parser.add_argument('--batch', type=int)
    train_parser.add_argument('--seed', type=int)
    train_parser.add_argument('--out-model', required=True)
    train_parser.add_argument('--log')
    train_parser.set_defaults(run=train_model)

    eval_parser = subparsers.add_parser(
        'eval', help='accuracy and distance statistics of a model')
    eval_parser.add_argument('--data', required=True)
    eval_parser.add_argument('--model', required=True)
    eval_parser.add_argument('--margin', type=float,
                             help='by default the margin of training')
    eval_parser.add_argument('--out', required=True)
    eval_parser.add_argument('--knn-reference',
                             help='also score a nearest neighbour vote '
                             'against the samples of this file')
    eval_parser.add_argument('--k', type=int, default=1,
                             help='number of neighbours of the vote')
    eval_parser.set_defaults(run=eval_model)

    grad_parser = subparsers.add_parser(
        'gradcheck', help='compare analytic and numeric gradients')
    grad_parser.add_argument('--seed', type=int, default=0)
    grad_parser.add_argument('--eps', type=float, default=1e-5)
    grad_parser.set_defaults(run=check_gradients)

    sweep_parser = subparsers.add_parser(
        'sweep-lambda', help='train and evaluate over a grid of lambdas')
    sweep_parser.add_argument('--train', required=True)
    sweep_parser.add_argument('--test', required=True)
    sweep_parser.add_argument('--config')
    sweep_parser.add_argument('--lambdas', type=_float_list, required=True,
                              help='comma separated, e.g.: 0,0.5,1')
    sweep_parser.add_argument('--seeds', type=_int_list, default=[0],
                              help='comma separated, e.g.: 1,2,3')
    sweep_parser.add_argument('--jobs', type=int, default=1,
                              help='number of worker processes')
    sweep_parser.add_argument('--out', required=True)
    sweep_parser.set_defaults(run=sweep_lambda)

    export_parser = subparsers.add_parser(
        'export-embeddings', help='write the embedding of every sample')
    export_parser.add_argument('--data', required=True)
    export_parser.add_argument('--model', required=True)
    export_parser.add_argument('--out', required=True)
    export_parser.add_argument('--pca2d', action='store_true',
                               help='add a planar projection')
    export_parser.add_argument('--plot',
                               help='figure of the planar projection')
    export_parser.set_defaults(run=export_model_embeddings)
    return parser.parse_args(args)


def run(argv=None):
    """ entry point of the `sembed` console script

    Parameters
    ----------
    argv : list of string
        arguments without the program name, by default `sys.argv[1:]`

    Returns
    -------
    code : integer
        exit code
    """
    try:
        args = parse_args(argv)
    except UsageError as err:
        print(err, file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as err:
        # --help and --version
        return err.code or 0

    logging.basicConfig(level=logging.INFO, stream=sys.stderr,
                        format='%(levelname)s %(name)s: %(message)s')
    try:
        return args.run(args)
    except (SembedError, OSError) as err:
        logger.error('%s', err)
        return EXIT_RUNTIME
