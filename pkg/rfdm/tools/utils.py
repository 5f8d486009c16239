import logging
import sys

import numpy as np

from rfdm import errors


def print_fun(s):
    print(s)
    sys.stdout.flush()


def float_list(s):
    return [float(v) for v in s.split(',') if v.strip()]


def add_log_args(parser):
    parser.add_argument(
        '--log_level',
        help='Logging level.',
        default='INFO',
        choices=['DEBUG', 'INFO', 'WARNING', 'ERROR'],
    )


def configure_logging(level='INFO'):
    logging.basicConfig(
        format='%(asctime)s %(levelname)-5s %(name)-10s [-] %(message)s',
        level=level
    )
    logging.root.setLevel(level)


def check_weights(weights, n_items):
    """Validate convex fusion weights and return them as a float array."""
    w = np.asarray(weights, dtype=float).ravel()
    if len(w) != n_items:
        raise errors.InvalidWeights('Expected %d weights, got %d' % (n_items, len(w)))
    if n_items == 0:
        raise errors.InvalidWeights('At least one weight is required')
    if not np.all(np.isfinite(w)) or np.any(w < 0):
        raise errors.InvalidWeights('Weights must be finite and nonnegative: %s' % w.tolist())
    if abs(w.sum() - 1.0) > 1e-12:
        raise errors.InvalidWeights('Weights must sum to 1, got %r' % float(w.sum()))
    return w
