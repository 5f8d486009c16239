import logging

import joblib
import numpy as np

from rfdm import errors
from rfdm.forest import tree as rfdm_tree
from rfdm.tools import rng as rfdm_rng

LOG = logging.getLogger(__name__)


class Forest(object):
    def __init__(self, trees, params, n_subjects, n_features, feature_ids=None, features=None):
        if len(trees) != params.n_trees:
            raise errors.DataError('Forest holds %d trees, params say %d' % (len(trees), params.n_trees))
        self.trees = trees
        self.params = params
        self.n_subjects = n_subjects
        self.n_features = n_features
        self.feature_ids = list(feature_ids) if feature_ids is not None else ['f%d' % i for i in range(n_features)]
        # training feature matrix, kept for proximity without the source table
        if features is not None:
            features = np.array(features, dtype=float)
            if features.shape != (n_subjects, n_features):
                raise errors.DimensionMismatch(
                    'Training features of shape %s for %d x %d forest' % (features.shape, n_subjects, n_features)
                )
            features.flags.writeable = False
        self.features = features

    def apply(self, features):
        """Terminal node ids, one column per tree."""
        features = np.asarray(features, dtype=float)
        if features.ndim != 2 or features.shape[1] != self.n_features:
            raise errors.DimensionMismatch(
                'Expected %d features, got shape %s' % (self.n_features, features.shape)
            )
        return np.stack([t.apply(features) for t in self.trees], axis=1)


def tree_seeds(params):
    return [rfdm_rng.derive_seed(params.seed, rfdm_rng.FOREST_TREE, t) for t in range(params.n_trees)]


def grow_forest(dataset, params):
    params.resolve_mtry(dataset.n_features)
    seeds = tree_seeds(params)
    LOG.info(
        'Growing %d trees on %d subjects x %d features (n_jobs=%d)',
        params.n_trees, dataset.n_subjects, dataset.n_features, params.n_jobs,
    )
    trees = joblib.Parallel(n_jobs=params.n_jobs)(
        joblib.delayed(rfdm_tree.grow_tree)(dataset, params, s) for s in seeds
    )
    n_splits = sum(len(t.nodes) - len(t.leaves()) for t in trees)
    LOG.info('Forest grown: %d internal nodes', n_splits)
    return Forest(
        list(trees), params, dataset.n_subjects, dataset.n_features,
        feature_ids=dataset.feature_ids, features=dataset.features,
    )
