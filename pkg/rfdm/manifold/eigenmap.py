import logging

import numpy as np
from scipy import linalg
from scipy.sparse import csgraph

from rfdm import defaults
from rfdm import errors
from rfdm.forest import proximity as rfdm_proximity
from rfdm.metric import distances
from rfdm.tools import dataset
from rfdm.tools import utils

LOG = logging.getLogger(__name__)

SYMMETRIC = 'symmetric'
UNNORMALIZED = 'unnormalized'
LAPLACIANS = [SYMMETRIC, UNNORMALIZED]


class Embedding(object):
    def __init__(self, coordinates, eigenvalues, degrees=None, laplacian=SYMMETRIC):
        self.coordinates = np.asarray(coordinates, dtype=float)
        self.eigenvalues = np.asarray(eigenvalues, dtype=float)
        if self.coordinates.ndim != 2 or self.coordinates.shape[1] < 1:
            raise errors.DataError('Embedding needs at least one dimension')
        if len(self.eigenvalues) != self.coordinates.shape[1]:
            raise errors.DimensionMismatch('%d eigenvalues for %d dimensions' % (
                len(self.eigenvalues), self.coordinates.shape[1]))
        self.degrees = degrees
        self.laplacian = laplacian

    @property
    def m(self):
        return self.coordinates.shape[1]


def _similarity_values(w):
    if isinstance(w, rfdm_proximity.ProximityMatrix):
        return np.array(w.values, dtype=float)
    return np.array(w, dtype=float)


def sparsify(w, n_neighbors):
    """Keep each row's ``n_neighbors`` strongest off-diagonal links, symmetrized by max."""
    n = w.shape[0]
    off = w.copy()
    np.fill_diagonal(off, -np.inf)
    keep = np.argsort(-off, axis=1, kind='mergesort')[:, :n_neighbors]
    mask = np.zeros_like(w, dtype=bool)
    mask[np.arange(n)[:, None], keep] = True
    sparse = np.where(mask, w, 0.0)
    sparse = np.maximum(sparse, sparse.T)
    np.fill_diagonal(sparse, np.diag(w))
    return sparse


def _sign_fixed(vectors):
    idx = np.argmax(np.abs(vectors), axis=0)
    signs = np.sign(vectors[idx, np.arange(vectors.shape[1])])
    signs[signs == 0] = 1.0
    return vectors * signs


def laplacian_eigenmap(w, m=defaults.DIMS, laplacian=defaults.LAPLACIAN, n_neighbors=None):
    w = _similarity_values(w)
    n = w.shape[0]
    if w.ndim != 2 or w.shape[1] != n:
        raise errors.DimensionMismatch('Similarity must be square, got %s' % (w.shape,))
    if m < 1 or n < m + 2:
        raise errors.DataError('Need N >= m + 2, got N=%d, m=%d' % (n, m))
    if np.any(w < 0) or not np.all(np.isfinite(w)):
        raise errors.DataError('Similarity entries must be finite and nonnegative')
    if np.max(np.abs(w - w.T)) > 1e-12:
        raise errors.DataError('Similarity must be symmetric')
    if laplacian not in LAPLACIANS:
        raise errors.DataError('Unknown Laplacian %r' % laplacian)
    if n_neighbors is not None and n_neighbors < n - 1:
        w = sparsify(w, n_neighbors)

    degrees = w.sum(axis=1)
    if np.any(degrees <= 0):
        raise errors.DataError('Row %d of the similarity has zero degree' % int(np.argmax(degrees <= 0)))
    n_comp, comp = csgraph.connected_components(w > 0, directed=False)
    if n_comp > 1:
        raise errors.DisconnectedGraph([np.nonzero(comp == c)[0] for c in range(n_comp)])

    if laplacian == SYMMETRIC:
        scale = 1.0 / np.sqrt(degrees)
        lap = np.eye(n) - scale[:, None] * w * scale[None, :]
    else:
        lap = np.diag(degrees) - w
    lap = 0.5 * (lap + lap.T)
    eigenvalues, vectors = linalg.eigh(lap)

    tol = defaults.DEGENERATE_GAP
    if eigenvalues[1] - eigenvalues[0] <= tol * max(1.0, abs(eigenvalues[1])):
        raise errors.DegenerateSpectrum('Trivial eigenvalue is not isolated: %r' % eigenvalues[:2].tolist())
    if eigenvalues[m + 1] - eigenvalues[m] <= tol * max(1.0, abs(eigenvalues[m])):
        raise errors.DegenerateSpectrum(
            'Eigenvalues %d and %d coincide (%r); the %d-dimensional embedding is not unique' % (
                m, m + 1, float(eigenvalues[m]), m)
        )

    coords = vectors[:, 1:m + 1]
    if laplacian == SYMMETRIC:
        coords = coords * scale[:, None]
    coords = coords / np.linalg.norm(coords, axis=0)
    coords = _sign_fixed(coords)
    LOG.debug('Eigenmap of %d subjects: eigenvalues %s', n, eigenvalues[1:m + 1])
    return Embedding(coords, eigenvalues[1:m + 1], degrees=degrees, laplacian=laplacian)


def embedding_distances(e):
    return distances.euclidean_distances(e.coordinates)


def fuse_proximities(w_list, weights):
    if not w_list:
        raise errors.EmptyInput('No proximity matrices to fuse')
    w = utils.check_weights(weights, len(w_list))
    values = [_similarity_values(x) for x in w_list]
    n = values[0].shape
    for a, v in enumerate(values):
        if v.shape != n:
            raise errors.DimensionMismatch('Proximity %d has shape %s, expected %s' % (a, v.shape, n))
    fused = np.zeros(n)
    for wa, v in zip(w, values):
        fused += wa * v
    np.clip(fused, 0.0, 1.0, out=fused)
    np.fill_diagonal(fused, 1.0)
    return rfdm_proximity.ProximityMatrix(fused)


def proximity_distance(w, m=defaults.DIMS, laplacian=defaults.LAPLACIAN, n_neighbors=None):
    return embedding_distances(laplacian_eigenmap(w, m=m, laplacian=laplacian, n_neighbors=n_neighbors))


def save_embedding(e, path, subject_ids=None):
    header = 'eigenvalues=%s' % ','.join(repr(float(v)) for v in e.eigenvalues)
    ids = subject_ids or ['s%d' % i for i in range(len(e.coordinates))]
    with open(path, 'w') as f:
        f.write('# %s\n' % header)
        f.write('subject_id,%s\n' % ','.join('dim%d' % (k + 1) for k in range(e.m)))
        for sid, row in zip(ids, e.coordinates):
            f.write('%s,%s\n' % (sid, ','.join('%.17g' % v for v in row)))


def load_embedding(path):
    eigenvalues = None
    with open(path) as f:
        first = f.readline()
    if first.startswith('#') and 'eigenvalues=' in first:
        eigenvalues = [float(v) for v in first.split('eigenvalues=', 1)[1].split(',')]
    subject_ids, _, coords = dataset.load_table(path)
    if eigenvalues is None:
        eigenvalues = [np.nan] * coords.shape[1]
    return subject_ids, Embedding(coords, eigenvalues)
