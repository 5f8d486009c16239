import logging

import numpy as np
from scipy import linalg
from scipy.spatial import distance

from rfdm import defaults
from rfdm import errors
from rfdm.tools import dataset
from rfdm.tools import utils

LOG = logging.getLogger(__name__)

EUCLIDEAN = 'euclidean'
DISCRETE = 'discrete'
GRAPH = 'graph'
SPD = 'spd'
METRICS = [EUCLIDEAN, DISCRETE, GRAPH, SPD]


def euclidean_distances(vectors):
    y = dataset.check_vectors(vectors)
    return dataset.validate_distance_matrix(distance.squareform(distance.pdist(y, 'euclidean')))


def discrete_distances(labels):
    z = dataset.check_labels(labels)
    return dataset.validate_distance_matrix((z[:, None] != z[None, :]).astype(float))


def graph_distances(graphs):
    graphs = dataset.check_graphs(graphs)
    counts = np.array([g.edge_count for g in graphs], dtype=float)
    return dataset.validate_distance_matrix(np.abs(counts[:, None] - counts[None, :]))


def _whitener(a):
    chol = linalg.cholesky(a, lower=True)
    return linalg.solve_triangular(chol, np.eye(a.shape[0]), lower=True)


def generalized_eigenvalues(a, b):
    """Eigenvalues of b relative to a, by whitening with the Cholesky factor of a."""
    white = _whitener(a)
    return linalg.eigvalsh(white.dot(b).dot(white.T))


def _spd_pair(white_i, b):
    lam = linalg.eigvalsh(white_i.dot(b).dot(white_i.T))
    clipped = lam < defaults.EIGEN_CLIP
    if clipped.any():
        lam = np.maximum(lam, defaults.EIGEN_CLIP)
    return np.sqrt(np.sum(np.log(lam) ** 2)), int(clipped.sum())


def spd_distance(a, b):
    mats = dataset.check_spd_matrices([a, b])
    return _spd_pair(_whitener(mats[0]), mats[1])[0]


def spd_distances(matrices):
    mats = dataset.check_spd_matrices(matrices)
    n = len(mats)
    whiteners = [_whitener(m) for m in mats]
    d = np.zeros((n, n))
    n_clipped = 0
    for i in range(n):
        for j in range(i + 1, n):
            d[i, j], clipped = _spd_pair(whiteners[i], mats[j])
            d[j, i] = d[i, j]
            n_clipped += clipped
    if n_clipped:
        LOG.warning('Clipped %d generalized eigenvalues below %g', n_clipped, defaults.EIGEN_CLIP)
    LOG.debug('Computed %d SPD distances of dimension %d', n * (n - 1) // 2, mats[0].shape[0])
    return dataset.validate_distance_matrix(d)


def fuse_distances(matrices, weights):
    if not matrices:
        raise errors.EmptyInput('No distance matrices to fuse')
    w = utils.check_weights(weights, len(matrices))
    n = matrices[0].n
    for a, m in enumerate(matrices):
        if m.n != n:
            raise errors.DimensionMismatch('Matrix %d is %dx%d, expected %dx%d' % (a, m.n, m.n, n, n))
    fused = np.zeros((n, n))
    for wa, m in zip(w, matrices):
        fused += wa * m.values
    return dataset.validate_distance_matrix(fused)


def response_distances(responses):
    """Default metric per response variant."""
    if responses.kind == dataset.ResponseSet.VECTORS:
        return euclidean_distances(responses.vectors)
    if responses.kind == dataset.ResponseSet.LABELS:
        return discrete_distances(responses.labels)
    if responses.kind == dataset.ResponseSet.GRAPHS:
        return graph_distances(responses.graphs)
    return spd_distances(responses.spd_matrices)


class MetricSpec(object):
    KINDS = {
        EUCLIDEAN: dataset.ResponseSet.VECTORS,
        DISCRETE: dataset.ResponseSet.LABELS,
        GRAPH: dataset.ResponseSet.GRAPHS,
        SPD: dataset.ResponseSet.SPD,
    }

    def __init__(self, kind):
        if kind not in self.KINDS:
            raise errors.DataError('Unknown metric %r, choose from %s' % (kind, METRICS))
        self.kind = kind

    def __call__(self, responses):
        if responses.kind != self.KINDS[self.kind]:
            raise errors.DataError(
                'Metric %s does not apply to %s responses' % (self.kind, responses.kind)
            )
        return response_distances(responses)
