import csv
import logging

import numpy as np
from sklearn import metrics

from rfdm import defaults
from rfdm import errors

LOG = logging.getLogger(__name__)


class RocCurve(object):
    def __init__(self, fpr, tpr):
        fpr = np.asarray(fpr, dtype=float)
        tpr = np.asarray(tpr, dtype=float)
        if fpr.shape != tpr.shape or fpr.ndim != 1 or len(fpr) < 2:
            raise errors.DataError('ROC curve needs matching fpr/tpr arrays of at least two points')
        if np.any(np.diff(fpr) < 0):
            raise errors.DataError('ROC fpr must be nondecreasing')
        self.fpr = fpr
        self.tpr = tpr

    @property
    def points(self):
        return list(zip(self.fpr.tolist(), self.tpr.tolist()))

    @property
    def auc(self):
        return float(metrics.auc(self.fpr, self.tpr))

    def __len__(self):
        return len(self.fpr)


def _key(item):
    # pairs compare unordered
    if isinstance(item, (tuple, list)):
        return frozenset(item)
    return item


def roc(ranked, truth):
    """ROC of a ranking of (item, score) against a set of true items.

    Tied scores form a single diagonal step.
    """
    truth = set(_key(t) for t in truth)
    if not truth:
        raise errors.EmptyInput('Empty truth set')
    keys = [_key(item) for item, _ in ranked]
    missing = truth - set(keys)
    if missing:
        raise errors.DataError('%d true items are not ranked, e.g. %r' % (len(missing), sorted(missing, key=str)[0]))
    y = np.array([k in truth for k in keys])
    if y.all():
        raise errors.DataError('Every ranked item is true, ROC is undefined')
    scores = np.array([score for _, score in ranked], dtype=float)
    fpr, tpr, _ = metrics.roc_curve(y, scores, drop_intermediate=False)
    return RocCurve(fpr, tpr)


def _upper_envelope(curve):
    """Unique fpr values with the lowest and highest tpr reached at each."""
    fpr, tpr = curve.fpr, curve.tpr
    unique, start = np.unique(fpr, return_index=True)
    stop = np.append(start[1:], len(fpr))
    low = np.array([tpr[a:b].min() for a, b in zip(start, stop)])
    high = np.array([tpr[a:b].max() for a, b in zip(start, stop)])
    return unique, low, high


def interpolate_tpr(curve, grid):
    """Curve tpr at each grid fpr; vertical segments resolve to their top."""
    unique, low, high = _upper_envelope(curve)
    grid = np.asarray(grid, dtype=float)
    k = np.clip(np.searchsorted(unique, grid, side='right') - 1, 0, len(unique) - 1)
    nxt = np.minimum(k + 1, len(unique) - 1)
    exact = unique[k] == grid
    span = unique[nxt] - unique[k]
    with np.errstate(divide='ignore', invalid='ignore'):
        frac = np.where(span > 0, (grid - unique[k]) / span, 0.0)
    between = high[k] + frac * (low[nxt] - high[k])
    return np.where(exact, high[k], between)


def mean_roc(curves, grid=None):
    """Vertical average of curves on a fixed fpr grid."""
    if not curves:
        raise errors.EmptyInput('No ROC curves to average')
    if grid is None:
        grid = np.linspace(0.0, 1.0, defaults.ROC_GRID_POINTS)
    grid = np.asarray(grid, dtype=float)
    tpr = np.mean([interpolate_tpr(c, grid) for c in curves], axis=0)
    fpr = grid
    if fpr[0] > 0 or tpr[0] > 0:
        fpr = np.concatenate([[0.0], fpr])
        tpr = np.concatenate([[0.0], tpr])
    return RocCurve(fpr, tpr)


def save_roc(curve, path):
    with open(path, 'w') as f:
        w = csv.writer(f, lineterminator='\n')
        w.writerow(['fpr', 'tpr'])
        for x, y in zip(curve.fpr, curve.tpr):
            w.writerow([repr(float(x)), repr(float(y))])


def load_roc(path):
    with open(path) as f:
        rows = [r for r in csv.reader(f) if r]
    if not rows or rows[0] != ['fpr', 'tpr']:
        raise errors.DataError('%s is not a ROC file' % path)
    if len(rows) < 3:
        raise errors.EmptyInput('%s holds fewer than two ROC points' % path)
    try:
        values = np.array([[float(x) for x in r] for r in rows[1:]])
    except ValueError as e:
        raise errors.DataError('Cannot parse %s: %s' % (path, e))
    return RocCurve(values[:, 0], values[:, 1])
