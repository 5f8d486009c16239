import logging

import numpy as np
from sklearn import ensemble

from rfdm import defaults
from rfdm.manifold import eigenmap
from rfdm.tools import dataset
from rfdm.tools import rng as rfdm_rng

LOG = logging.getLogger(__name__)

TRTE_STREAM = 2


def trte_leaves(vectors, n_trees=defaults.TRTE_TREES, max_depth=defaults.TRTE_MAX_DEPTH, seed=defaults.SEED,
                n_jobs=defaults.N_JOBS):
    """Sparse binary leaf indicators, one block of columns per tree."""
    y = dataset.check_vectors(vectors)
    embedder = ensemble.RandomTreesEmbedding(
        n_estimators=n_trees,
        max_depth=max_depth,
        min_samples_split=2,
        min_samples_leaf=1,
        sparse_output=True,
        n_jobs=n_jobs,
        random_state=rfdm_rng.derive_seed(seed, TRTE_STREAM),
    )
    return embedder.fit_transform(y), embedder


def trte_proximity(vectors, n_trees=defaults.TRTE_TREES, max_depth=defaults.TRTE_MAX_DEPTH, seed=defaults.SEED,
                   n_jobs=defaults.N_JOBS):
    """Fraction of trees in which two subjects share a leaf."""
    y = dataset.check_vectors(vectors)
    n = y.shape[0]
    if max_depth == 0:
        return np.ones((n, n))
    leaves, _ = trte_leaves(y, n_trees=n_trees, max_depth=max_depth, seed=seed, n_jobs=n_jobs)
    shared = leaves.dot(leaves.T).toarray()
    return shared / float(n_trees)


def trte_embed(vectors, n_trees=defaults.TRTE_TREES, max_depth=defaults.TRTE_MAX_DEPTH, m=defaults.DIMS,
               seed=defaults.SEED, n_jobs=defaults.N_JOBS):
    p = trte_proximity(vectors, n_trees=n_trees, max_depth=max_depth, seed=seed, n_jobs=n_jobs)
    LOG.info('Totally random trees proximity from %d trees of depth %d', n_trees, max_depth)
    return eigenmap.laplacian_eigenmap(p, m=m)


def trte_distance(vectors, n_trees=defaults.TRTE_TREES, max_depth=defaults.TRTE_MAX_DEPTH, m=defaults.DIMS,
                  seed=defaults.SEED, n_jobs=defaults.N_JOBS):
    return eigenmap.embedding_distances(
        trte_embed(vectors, n_trees=n_trees, max_depth=max_depth, m=m, seed=seed, n_jobs=n_jobs)
    )
