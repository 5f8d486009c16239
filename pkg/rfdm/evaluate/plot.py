import logging

import matplotlib
matplotlib.use('Agg')
from matplotlib import pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from rfdm import errors  # noqa: E402

LOG = logging.getLogger(__name__)

# Keeps every curve vertex and makes the SVG byte-stable.
SVG_RC = {
    'path.simplify': False,
    'svg.hashsalt': 'rfdm',
    'svg.fonttype': 'none',
}


def _save(fig, path):
    try:
        fig.savefig(path, format='svg', metadata={'Date': None})
    except (IOError, OSError) as e:
        raise errors.DataError('Cannot write plot %s: %s' % (path, e))
    finally:
        plt.close(fig)
    LOG.info('Wrote %s', path)


def emit_plot(curves, labels, path, title=None):
    """ROC curves on the unit square with the chance diagonal."""
    if len(curves) != len(labels):
        raise errors.DimensionMismatch('%d curves but %d labels' % (len(curves), len(labels)))
    with matplotlib.rc_context(SVG_RC):
        fig, ax = plt.subplots(figsize=(6, 6))
        ax.plot([0, 1], [0, 1], linestyle='--', color='grey', linewidth=1, gid='diagonal')
        for i, (curve, label) in enumerate(zip(curves, labels)):
            ax.plot(curve.fpr, curve.tpr, linewidth=1.5, gid='roc-%d' % i,
                    label='%s (AUC=%.3f)' % (label, curve.auc))
        ax.set_xlim(0, 1)
        ax.set_ylim(0, 1)
        ax.set_xlabel('False positive rate')
        ax.set_ylabel('True positive rate')
        if title:
            ax.set_title(title)
        if curves:
            ax.legend(loc='lower right')
        _save(fig, path)


def emit_manifold_plot(coordinates, labels, path, title=None):
    """First two embedding coordinates, one colour per label value."""
    coordinates = np.asarray(coordinates, dtype=float)
    labels = np.asarray(labels)
    if coordinates.ndim != 2 or coordinates.shape[1] < 2:
        raise errors.DataError('Need at least two embedding dimensions to plot')
    if len(labels) != len(coordinates):
        raise errors.DimensionMismatch('%d points but %d labels' % (len(coordinates), len(labels)))
    with matplotlib.rc_context(SVG_RC):
        fig, ax = plt.subplots(figsize=(6, 6))
        for value in np.unique(labels):
            mask = labels == value
            ax.scatter(coordinates[mask, 0], coordinates[mask, 1], s=12, label=str(value),
                       gid='class-%s' % value)
        ax.set_xlabel('dim1')
        ax.set_ylabel('dim2')
        if title:
            ax.set_title(title)
        ax.legend()
        _save(fig, path)


def emit_penetrance_plot(grid, curves, penetrances, path):
    """Disease posterior against the mean disease-parcel value, one line per penetrance."""
    curves = np.atleast_2d(curves)
    if len(curves) != len(penetrances):
        raise errors.DimensionMismatch('%d curves but %d penetrance levels' % (len(curves), len(penetrances)))
    with matplotlib.rc_context(SVG_RC):
        fig, ax = plt.subplots(figsize=(7, 5))
        for i, (row, p) in enumerate(zip(curves, penetrances)):
            ax.plot(grid, row, gid='penetrance-%d' % i, label='penetrance %.2f' % p)
        ax.set_ylim(0, 1)
        ax.set_xlabel('Mean disease parcel value')
        ax.set_ylabel('P(disease)')
        ax.legend(loc='upper left')
        _save(fig, path)
