import logging

import numpy as np

from rfdm import errors

LOG = logging.getLogger(__name__)


class ProximityMatrix(object):
    """Out-of-bag terminal node co-occurrence rates.

    ``counts`` holds the number of trees in which both subjects were out of
    bag. Off-diagonal pairs with a zero count have proximity 0 and are
    listed in ``never_joint``.
    """

    def __init__(self, values, counts=None):
        values = np.array(values, dtype=float)
        if values.ndim != 2 or values.shape[0] != values.shape[1]:
            raise errors.DimensionMismatch('Proximity must be square, got %s' % (values.shape,))
        if np.any(values < 0) or np.any(values > 1):
            raise errors.DataError('Proximity entries must lie in [0, 1]')
        if np.max(np.abs(values - values.T)) > 1e-12:
            raise errors.DataError('Proximity must be symmetric')
        if np.any(np.diag(values) != 1):
            raise errors.DataError('Proximity diagonal must be 1')
        values.flags.writeable = False
        self.values = values
        self.counts = counts
        if counts is not None:
            off = ~np.eye(len(values), dtype=bool)
            self.never_joint = np.argwhere(np.triu((counts == 0) & off))
        else:
            self.never_joint = np.zeros((0, 2), dtype=np.int64)

    @property
    def n(self):
        return self.values.shape[0]


def oob_counts(tree, features):
    """(same terminal node, both out of bag) integer counts of one tree."""
    n = features.shape[0]
    same = np.zeros((n, n), dtype=np.int64)
    joint = np.zeros((n, n), dtype=np.int64)
    oob = tree.oob
    if len(oob) == 0:
        return same, joint
    leaves = tree.apply(features[oob])
    block = np.ix_(oob, oob)
    joint[block] = 1
    same[block] = leaves[:, None] == leaves[None, :]
    return same, joint


def proximity(forest, dataset=None):
    """OOB proximity of the subjects in ``dataset``, or of the forest's own training subjects."""
    if dataset is None:
        if forest.features is None:
            raise errors.DataError('Forest carries no training features; pass the dataset it was grown on')
        features = forest.features
    else:
        features = dataset.features
    if features.shape[0] != forest.n_subjects:
        raise errors.DimensionMismatch(
            'Forest was grown on %d subjects, dataset has %d' % (forest.n_subjects, features.shape[0])
        )
    n = features.shape[0]
    same = np.zeros((n, n), dtype=np.int64)
    joint = np.zeros((n, n), dtype=np.int64)
    for t in forest.trees:
        s, j = oob_counts(t, features)
        same += s
        joint += j

    values = np.zeros((n, n))
    seen = joint > 0
    values[seen] = same[seen] / joint[seen].astype(float)
    np.fill_diagonal(values, 1.0)
    result = ProximityMatrix(values, counts=joint)
    if len(result.never_joint):
        LOG.warning('%d subject pairs were never jointly out of bag; their proximity is 0', len(result.never_joint))
    return result
