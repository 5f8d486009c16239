import csv
import logging
import os

import numpy as np

from rfdm import defaults
from rfdm import errors
from rfdm.tools import rng as rfdm_rng

LOG = logging.getLogger(__name__)

MANIFEST_FILENAME = 'manifest.txt'
GENOTYPE_LEVELS = (0, 1, 2)


def _frozen(values, dtype=None):
    arr = np.array(values, dtype=dtype, copy=True)
    arr.flags.writeable = False
    return arr


def _check_unique(ids, kind):
    seen = set()
    for i in ids:
        if i in seen:
            raise errors.DuplicateId(kind, i)
        seen.add(i)


def _default_ids(prefix, n):
    return ['%s%d' % (prefix, i) for i in range(n)]


class GenotypeMatrix(object):
    """N subjects x p SNPs of minor allele counts."""

    def __init__(self, values, snp_ids=None, subject_ids=None):
        values = np.asarray(values)
        if values.ndim != 2:
            raise errors.DimensionMismatch('Genotypes must be a 2-D matrix, got shape %s' % (values.shape,))
        n, p = values.shape
        if n < 2 or p < 1:
            raise errors.InsufficientSubjects(
                'Genotype matrix needs at least 2 subjects and 1 SNP, got %dx%d' % (n, p)
            )
        bad = ~np.isin(values, GENOTYPE_LEVELS)
        if bad.any():
            row, col = np.argwhere(bad)[0]
            raise errors.MalformedCell(int(row), int(col), values[row, col])

        self.snp_ids = list(snp_ids) if snp_ids is not None else _default_ids('snp', p)
        self.subject_ids = list(subject_ids) if subject_ids is not None else _default_ids('s', n)
        if len(self.snp_ids) != p:
            raise errors.DimensionMismatch('%d SNP ids for %d columns' % (len(self.snp_ids), p))
        if len(self.subject_ids) != n:
            raise errors.DimensionMismatch('%d subject ids for %d rows' % (len(self.subject_ids), n))
        _check_unique(self.snp_ids, 'SNP')
        _check_unique(self.subject_ids, 'subject')
        self.values = _frozen(values, dtype=np.int8)

    @property
    def n_subjects(self):
        return self.values.shape[0]

    @property
    def n_snps(self):
        return self.values.shape[1]

    def subset(self, rows):
        rows = np.asarray(rows, dtype=int)
        return GenotypeMatrix(
            self.values[rows],
            snp_ids=self.snp_ids,
            subject_ids=[self.subject_ids[i] for i in rows],
        )

    def __eq__(self, other):
        return (
            isinstance(other, GenotypeMatrix)
            and np.array_equal(self.values, other.values)
            and self.snp_ids == other.snp_ids
            and self.subject_ids == other.subject_ids
        )

    def __ne__(self, other):
        return not self == other


class Graph(object):
    """Undirected graph on vertices 0..n_vertices-1."""

    def __init__(self, n_vertices, edges, weights=None):
        edges = np.asarray(edges, dtype=int).reshape(-1, 2)
        if len(edges) and (edges.min() < 0 or edges.max() >= n_vertices):
            raise errors.DataError('Edge endpoint outside 0..%d' % (n_vertices - 1))
        loops = edges[:, 0] == edges[:, 1]
        if loops.any():
            v = int(edges[loops][0, 0])
            raise errors.DataError('Self-loop on vertex %d' % v)
        edges = np.sort(edges, axis=1)
        if weights is not None:
            weights = np.asarray(weights, dtype=float)
            if weights.shape != (len(edges),):
                raise errors.DimensionMismatch('%d weights for %d edges' % (len(weights), len(edges)))
        if len(edges):
            _, first = np.unique(edges, axis=0, return_index=True)
            if len(first) < len(edges):
                if weights is not None:
                    dup = np.setdiff1d(np.arange(len(edges)), first)[0]
                    raise errors.DataError('Weighted edge (%d, %d) listed twice' % tuple(edges[dup]))
                edges = edges[np.sort(first)]
        if weights is not None:
            weights = _frozen(weights)
        self.n_vertices = int(n_vertices)
        self.edges = _frozen(edges)
        self.weights = weights

    @property
    def edge_count(self):
        if self.weights is None:
            return len(self.edges)
        return int(np.count_nonzero(self.weights))


class ResponseSet(object):
    VECTORS = 'vectors'
    LABELS = 'labels'
    SPD = 'spd_matrices'
    GRAPHS = 'graphs'

    def __init__(self, vectors=None, labels=None, spd_matrices=None, graphs=None):
        given = [
            (k, v) for k, v in (
                (self.VECTORS, vectors), (self.LABELS, labels),
                (self.SPD, spd_matrices), (self.GRAPHS, graphs),
            ) if v is not None
        ]
        if len(given) != 1:
            raise errors.DataError('A response set holds exactly one variant, got %d' % len(given))
        self.kind, value = given[0]

        if self.kind == self.VECTORS:
            value = check_vectors(value)
        elif self.kind == self.LABELS:
            value = check_labels(value)
        elif self.kind == self.SPD:
            value = check_spd_matrices(value)
        else:
            value = check_graphs(value)
        self.value = value

    def __len__(self):
        return len(self.value)

    @property
    def vectors(self):
        return self.value if self.kind == self.VECTORS else None

    @property
    def labels(self):
        return self.value if self.kind == self.LABELS else None

    @property
    def spd_matrices(self):
        return self.value if self.kind == self.SPD else None

    @property
    def graphs(self):
        return self.value if self.kind == self.GRAPHS else None


def check_vectors(vectors):
    y = np.asarray(vectors, dtype=float)
    if y.ndim == 1:
        y = y.reshape(-1, 1)
    if y.ndim != 2 or y.shape[0] == 0:
        raise errors.EmptyInput('Vectors must be a nonempty N x q matrix')
    if not np.all(np.isfinite(y)):
        row, col = np.argwhere(~np.isfinite(y))[0]
        raise errors.MalformedCell(int(row), int(col), y[row, col], 'non-finite value')
    return _frozen(y)


def check_labels(labels):
    z = np.asarray(labels)
    if z.ndim != 1 or len(z) == 0:
        raise errors.EmptyInput('Labels must be a nonempty vector')
    if not np.issubdtype(z.dtype, np.integer):
        if not np.all(np.isfinite(z.astype(float))) or np.any(z.astype(float) != np.round(z.astype(float))):
            raise errors.DataError('Labels must be integers')
        z = z.astype(int)
    if z.min() < 0:
        raise errors.DataError('Labels must lie in 0..c-1, found %d' % z.min())
    return _frozen(z, dtype=np.int64)


def check_spd_matrices(matrices):
    mats = [np.asarray(m, dtype=float) for m in matrices]
    if not mats:
        raise errors.EmptyInput('No matrices given')
    dim = mats[0].shape
    for i, m in enumerate(mats):
        if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape != dim:
            raise errors.DimensionMismatch('Matrix %d has shape %s, expected %s' % (i, m.shape, dim))
        if not np.all(np.isfinite(m)):
            raise errors.NotPositiveDefinite(i, np.nan, np.nan)
        if np.max(np.abs(m - m.T)) > 1e-10 * max(1.0, np.max(np.abs(m))):
            raise errors.DataError('Matrix %d is not symmetric' % i)
        eig = np.linalg.eigvalsh(m)
        if eig[0] <= defaults.SPD_GATE * eig[-1] or eig[-1] <= 0:
            raise errors.NotPositiveDefinite(i, eig[0], eig[-1])
    return [_frozen(0.5 * (m + m.T)) for m in mats]


def check_graphs(graphs):
    graphs = list(graphs)
    if not graphs:
        raise errors.EmptyInput('No graphs given')
    n = graphs[0].n_vertices
    for i, g in enumerate(graphs):
        if g.n_vertices != n:
            raise errors.VertexSetMismatch(
                'Graph %d has %d vertices, expected %d' % (i, g.n_vertices, n)
            )
    return graphs


class DistanceMatrix(object):
    """Validated N x N response distances. Build through validate_distance_matrix."""

    def __init__(self, values):
        self.values = _frozen(values, dtype=float)

    @property
    def n(self):
        return self.values.shape[0]

    def __len__(self):
        return self.n


def _check_triangle(d, seed=None):
    n = d.shape[0]
    tol = defaults.TRIANGLE_TOLERANCE
    if n <= defaults.TRIANGLE_EXHAUSTIVE_MAX_N:
        for j in range(n):
            # paths i -> j -> k against direct i -> k
            via = d[:, j][:, None] + d[j, :][None, :]
            excess = d - via
            if excess.max() > tol:
                i, k = np.unravel_index(np.argmax(excess), excess.shape)
                raise errors.TriangleViolation(int(i), j, int(k), float(excess[i, k]))
        return

    rng = rfdm_rng.generator(seed or 0, rfdm_rng.TRIANGLE_SAMPLING)
    n_samples = defaults.TRIANGLE_SAMPLES_PER_N2 * n * n
    chunk = 1000000
    for start in range(0, n_samples, chunk):
        size = min(chunk, n_samples - start)
        i, j, k = rng.integers(0, n, size=(3, size))
        excess = d[i, k] - d[i, j] - d[j, k]
        worst = np.argmax(excess)
        if excess[worst] > tol:
            raise errors.TriangleViolation(int(i[worst]), int(j[worst]), int(k[worst]), float(excess[worst]))


def validate_distance_matrix(values, seed=None):
    d = np.array(values, dtype=float)
    if d.ndim != 2 or d.shape[0] != d.shape[1]:
        raise errors.DimensionMismatch('Distance matrix must be square, got shape %s' % (d.shape,))
    if d.shape[0] == 0:
        raise errors.EmptyInput('Distance matrix is empty')
    if not np.all(np.isfinite(d)):
        row, col = np.argwhere(~np.isfinite(d))[0]
        raise errors.MalformedCell(int(row), int(col), d[row, col], 'non-finite distance')

    diag = np.diag(d)
    if np.any(diag != 0):
        i = int(np.argmax(diag != 0))
        raise errors.NonzeroDiagonal(i, diag[i])
    if np.any(d < 0):
        i, j = np.argwhere(d < 0)[0]
        raise errors.NegativeDistance(int(i), int(j), d[i, j])
    asym = np.abs(d - d.T)
    if asym.max() > defaults.SYMMETRY_TOLERANCE:
        i, j = np.unravel_index(np.argmax(asym), asym.shape)
        raise errors.AsymmetryAboveTolerance(int(min(i, j)), int(max(i, j)), float(asym[i, j]))
    if asym.max() > 0:
        d = 0.5 * (d + d.T)

    _check_triangle(d, seed=seed)
    return DistanceMatrix(d)


class Dataset(object):
    """Features with their response distances.

    ``genotypes`` is normally a GenotypeMatrix; any real N x p matrix is
    accepted as features (phenotype vectors for the supervised manifold).
    ``distances`` may be attached later with ``with_distances``.
    """

    def __init__(self, genotypes, distances=None, responses=None, labels=None, feature_ids=None):
        if isinstance(genotypes, GenotypeMatrix):
            features = genotypes.values
            feature_ids = genotypes.snp_ids
        else:
            features = check_vectors(genotypes)
            if feature_ids is None:
                feature_ids = _default_ids('f', features.shape[1])
        self.genotypes = genotypes
        self.features = _frozen(features, dtype=float)
        self.feature_ids = list(feature_ids)
        self.discrete = bool(np.isin(self.features, GENOTYPE_LEVELS).all())

        n = self.features.shape[0]
        if distances is not None and not isinstance(distances, DistanceMatrix):
            distances = validate_distance_matrix(distances)
        if distances is not None and distances.n != n:
            raise errors.DimensionMismatch('%d subjects but %dx%d distances' % (n, distances.n, distances.n))
        if responses is not None and len(responses) != n:
            raise errors.DimensionMismatch('%d subjects but %d responses' % (n, len(responses)))
        if labels is not None:
            labels = check_labels(labels)
            if len(labels) != n:
                raise errors.DimensionMismatch('%d subjects but %d labels' % (n, len(labels)))
        self.distances = distances
        self.responses = responses
        self.labels = labels

    @property
    def n_subjects(self):
        return self.features.shape[0]

    @property
    def n_features(self):
        return self.features.shape[1]

    @property
    def subject_ids(self):
        if isinstance(self.genotypes, GenotypeMatrix):
            return self.genotypes.subject_ids
        return _default_ids('s', self.n_subjects)

    def with_distances(self, distances):
        return Dataset(
            self.genotypes, distances, responses=self.responses,
            labels=self.labels, feature_ids=self.feature_ids,
        )


def _read_rows(path):
    with open(path) as f:
        rows = [r for r in csv.reader(f) if r and not r[0].startswith('#')]
    if not rows:
        raise errors.EmptyInput('Empty file: %s' % path)
    return rows


def load_genotypes(path):
    rows = _read_rows(path)
    header, body = rows[0], rows[1:]
    if not body:
        raise errors.EmptyInput('No subjects in %s' % path)
    snp_ids = [h.strip() for h in header[1:]]
    subject_ids = []
    values = np.zeros((len(body), len(snp_ids)), dtype=np.int8)
    for r, row in enumerate(body):
        if len(row) != len(snp_ids) + 1:
            raise errors.DimensionMismatch(
                'Row %d of %s has %d cells, expected %d' % (r, path, len(row), len(snp_ids) + 1)
            )
        subject_ids.append(row[0].strip())
        for c, cell in enumerate(row[1:]):
            cell = cell.strip()
            if cell not in ('0', '1', '2'):
                raise errors.MalformedCell(r, c, cell)
            values[r, c] = int(cell)
    return GenotypeMatrix(values, snp_ids=snp_ids, subject_ids=subject_ids)


def save_genotypes(genotypes, path):
    with open(path, 'w') as f:
        w = csv.writer(f, lineterminator='\n')
        w.writerow(['subject_id'] + list(genotypes.snp_ids))
        for sid, row in zip(genotypes.subject_ids, genotypes.values):
            w.writerow([sid] + [int(v) for v in row])


def load_matrix(path):
    rows = _read_rows(path)
    try:
        return np.array([[float(c) for c in row] for row in rows])
    except ValueError as e:
        raise errors.DataError('Cannot parse %s: %s' % (path, e))


def load_distances(path):
    return validate_distance_matrix(load_matrix(path))


def save_matrix(values, path, header=None):
    values = np.asarray(values, dtype=float)
    if values.ndim == 1:
        values = values.reshape(-1, 1)
    np.savetxt(path, values, delimiter=',', fmt='%.17g', header=header or '', comments='# ')


def save_distances(distances, path):
    save_matrix(distances.values, path)


def load_table(path):
    """CSV with a header row and a subject id column. Returns (subject_ids, column_ids, values)."""
    rows = _read_rows(path)
    header, body = rows[0], rows[1:]
    if not body:
        raise errors.EmptyInput('No rows in %s' % path)
    subject_ids = [row[0].strip() for row in body]
    _check_unique(subject_ids, 'subject')
    values = np.zeros((len(body), len(header) - 1))
    for r, row in enumerate(body):
        if len(row) != len(header):
            raise errors.DimensionMismatch('Row %d of %s has %d cells, expected %d' % (r, path, len(row), len(header)))
        for c, cell in enumerate(row[1:]):
            try:
                values[r, c] = float(cell)
            except ValueError:
                raise errors.MalformedCell(r, c, cell, 'not a number')
    return subject_ids, [h.strip() for h in header[1:]], values


def save_table(values, path, subject_ids=None, column_ids=None, fmt='%.17g'):
    values = np.asarray(values)
    if values.ndim == 1:
        values = values.reshape(-1, 1)
    subject_ids = subject_ids or _default_ids('s', values.shape[0])
    column_ids = column_ids or _default_ids('roi', values.shape[1])
    with open(path, 'w') as f:
        w = csv.writer(f, lineterminator='\n')
        w.writerow(['subject_id'] + list(column_ids))
        for sid, row in zip(subject_ids, values):
            w.writerow([sid] + [fmt % v for v in row])


def load_vectors(path):
    subject_ids, _, values = load_table(path)
    return subject_ids, check_vectors(values)


def save_vectors(vectors, path, subject_ids=None):
    save_table(vectors, path, subject_ids=subject_ids)


def load_labels(path):
    subject_ids, _, values = load_table(path)
    return subject_ids, check_labels(values[:, 0])


def save_labels(labels, path, subject_ids=None):
    save_table(np.asarray(labels), path, subject_ids=subject_ids, column_ids=['label'], fmt='%d')


def _read_manifest(dirname):
    path = os.path.join(dirname, MANIFEST_FILENAME)
    if not os.path.isfile(path):
        raise errors.EmptyInput('Missing %s in %s' % (MANIFEST_FILENAME, dirname))
    with open(path) as f:
        ids = [line.strip() for line in f if line.strip()]
    if not ids:
        raise errors.EmptyInput('Empty manifest in %s' % dirname)
    _check_unique(ids, 'subject')
    return ids


def _write_manifest(dirname, subject_ids):
    if not os.path.isdir(dirname):
        os.makedirs(dirname)
    with open(os.path.join(dirname, MANIFEST_FILENAME), 'w') as f:
        for sid in subject_ids:
            f.write('%s\n' % sid)


def load_matrix_bundle(dirname):
    subject_ids = _read_manifest(dirname)
    matrices = []
    for sid in subject_ids:
        rows = _read_rows(os.path.join(dirname, '%s.csv' % sid))
        matrices.append(np.array([[float(c) for c in row] for row in rows]))
    return subject_ids, check_spd_matrices(matrices)


def save_matrix_bundle(matrices, dirname, subject_ids=None):
    subject_ids = subject_ids or _default_ids('s', len(matrices))
    _write_manifest(dirname, subject_ids)
    for sid, m in zip(subject_ids, matrices):
        save_matrix(m, os.path.join(dirname, '%s.csv' % sid))


def load_graph(path):
    n_vertices = None
    edges = []
    weights = []
    with open(path) as f:
        for line in f:
            line = line.strip()
            if not line:
                continue
            if line.startswith('#'):
                key, _, value = line.lstrip('# ').partition('=')
                if key.strip() == 'n_vertices':
                    n_vertices = int(value)
                continue
            cells = line.split(',')
            edges.append((int(cells[0]), int(cells[1])))
            if len(cells) > 2:
                weights.append(float(cells[2]))
    if weights and len(weights) != len(edges):
        raise errors.DataError('Some edges of %s are weighted and some are not' % path)
    if n_vertices is None:
        n_vertices = (max(max(e) for e in edges) + 1) if edges else 0
    return Graph(n_vertices, edges, weights=weights or None)


def save_graph(graph, path):
    with open(path, 'w') as f:
        f.write('# n_vertices=%d\n' % graph.n_vertices)
        for e, (u, v) in enumerate(graph.edges):
            if graph.weights is None:
                f.write('%d,%d\n' % (u, v))
            else:
                f.write('%d,%d,%.17g\n' % (u, v, graph.weights[e]))


def load_graph_bundle(dirname):
    subject_ids = _read_manifest(dirname)
    graphs = [load_graph(os.path.join(dirname, '%s.csv' % sid)) for sid in subject_ids]
    return subject_ids, check_graphs(graphs)


def save_graph_bundle(graphs, dirname, subject_ids=None):
    subject_ids = subject_ids or _default_ids('s', len(graphs))
    _write_manifest(dirname, subject_ids)
    for sid, g in zip(subject_ids, graphs):
        save_graph(g, os.path.join(dirname, '%s.csv' % sid))
