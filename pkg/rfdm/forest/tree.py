import logging
import math

import numpy as np

from rfdm import defaults
from rfdm import errors
from rfdm.tools import dataset as rfdm_dataset
from rfdm.tools import rng as rfdm_rng

LOG = logging.getLogger(__name__)

PER_NODE_NORMALIZED = 'per_node_normalized'
LITERAL_EQ1 = 'literal_eq1'
SHANNON = 'shannon'
LEAF = -1


class ForestParams(object):
    def __init__(self,
                 n_trees=defaults.N_TREES,
                 mtry=defaults.MTRY,
                 max_depth=defaults.MAX_DEPTH,
                 min_node_size=defaults.MIN_NODE_SIZE,
                 seed=defaults.SEED,
                 gain_variant=defaults.GAIN_VARIANT,
                 task=defaults.TASK_REGRESSION,
                 n_jobs=defaults.N_JOBS):
        if n_trees < 1:
            raise errors.DataError('n_trees must be positive, got %d' % n_trees)
        if max_depth < 0:
            raise errors.DataError('max_depth must be nonnegative, got %d' % max_depth)
        if min_node_size < 1:
            raise errors.DataError('min_node_size must be at least 1, got %d' % min_node_size)
        if gain_variant not in defaults.GAIN_VARIANTS:
            raise errors.DataError('Unknown gain variant %r' % gain_variant)
        if task not in (defaults.TASK_REGRESSION, defaults.TASK_CLASSIFICATION):
            raise errors.DataError('Unknown task %r' % task)
        if mtry in (None, 'auto'):
            mtry = 'auto'
        elif int(mtry) < 1:
            raise errors.DataError('mtry must be positive, got %s' % mtry)
        else:
            mtry = int(mtry)
        self.n_trees = int(n_trees)
        self.mtry = mtry
        self.max_depth = int(max_depth)
        self.min_node_size = int(min_node_size)
        self.seed = int(seed)
        self.gain_variant = gain_variant
        self.task = task
        self.n_jobs = int(n_jobs)

    def resolve_mtry(self, n_features):
        if self.mtry == 'auto':
            if self.task == defaults.TASK_CLASSIFICATION:
                return int(math.ceil(math.sqrt(n_features)))
            return int(math.ceil(n_features / 3.0))
        if self.mtry > n_features:
            raise errors.DataError('mtry=%d exceeds the number of features %d' % (self.mtry, n_features))
        return self.mtry

    def to_dict(self):
        return {
            'n_trees': self.n_trees,
            'mtry': self.mtry,
            'max_depth': self.max_depth,
            'min_node_size': self.min_node_size,
            'seed': self.seed,
            'gain_variant': self.gain_variant,
            'task': self.task,
            'n_jobs': self.n_jobs,
        }

    @classmethod
    def from_dict(cls, d):
        d = dict(d)
        unknown = set(d) - set(cls().to_dict())
        if unknown:
            raise errors.DataError('Unknown forest parameter(s): %s' % ', '.join(sorted(unknown)))
        return cls(**d)

    def replace(self, **kwargs):
        d = self.to_dict()
        d.update(kwargs)
        return ForestParams(**d)


class SplitCriterion(object):
    def __init__(self, feature, split_point):
        self.feature = int(feature)
        self.split_point = float(split_point)

    def goes_left(self, features):
        return features[:, self.feature] <= self.split_point

    def __eq__(self, other):
        return (
            isinstance(other, SplitCriterion)
            and self.feature == other.feature
            and self.split_point == other.split_point
        )

    def __ne__(self, other):
        return not self == other

    def __repr__(self):
        return 'SplitCriterion(feature=%d, split_point=%g)' % (self.feature, self.split_point)


class TreeNode(object):
    def __init__(self, index_set, depth, candidates=None, split=None, gain=0.0, left=LEAF, right=LEAF):
        self.index_set = np.asarray(index_set, dtype=np.int64)
        self.depth = depth
        self.candidates = (
            np.asarray(candidates, dtype=np.int64) if candidates is not None
            else np.zeros(0, dtype=np.int64)
        )
        self.split = split
        self.gain = float(gain)
        self.left = left
        self.right = right

    @property
    def size(self):
        return len(self.index_set)

    @property
    def is_leaf(self):
        return self.split is None


class Tree(object):
    """Nodes are stored in pre-order; children are referenced by node id."""

    def __init__(self, nodes, in_bag, n_subjects, tree_seed=None):
        self.nodes = nodes
        self.in_bag = np.sort(np.asarray(in_bag, dtype=np.int64))
        self.n_subjects = n_subjects
        self.tree_seed = tree_seed
        counts = np.bincount(self.in_bag, minlength=n_subjects)
        self.oob = np.nonzero(counts == 0)[0]
        self._arrays = None

    @property
    def root(self):
        return self.nodes[0]

    def children(self, node):
        return self.nodes[node.left], self.nodes[node.right]

    def routing_arrays(self):
        if self._arrays is None:
            feature = np.array([LEAF if n.is_leaf else n.split.feature for n in self.nodes], dtype=np.int64)
            threshold = np.array([np.nan if n.is_leaf else n.split.split_point for n in self.nodes])
            left = np.array([n.left for n in self.nodes], dtype=np.int64)
            right = np.array([n.right for n in self.nodes], dtype=np.int64)
            self._arrays = feature, threshold, left, right
        return self._arrays

    def apply(self, features):
        """Terminal node id of every row of ``features``."""
        feature, threshold, left, right = self.routing_arrays()
        features = np.asarray(features, dtype=float)
        node = np.zeros(features.shape[0], dtype=np.int64)
        while True:
            f = feature[node]
            rows = np.nonzero(f != LEAF)[0]
            if len(rows) == 0:
                return node
            here = node[rows]
            go_left = features[rows, f[rows]] <= threshold[here]
            node[rows] = np.where(go_left, left[here], right[here])

    def leaves(self):
        return [i for i, n in enumerate(self.nodes) if n.is_leaf]


def _node_sum(sq, idx):
    return sq[np.ix_(idx, idx)].sum()


def _check_partition(parent, left, right):
    parent = np.asarray(parent, dtype=np.int64)
    left = np.asarray(left, dtype=np.int64)
    right = np.asarray(right, dtype=np.int64)
    if len(left) == 0 or len(right) == 0:
        raise errors.DataError('Empty child in split')
    if len(left) + len(right) != len(parent) or not np.array_equal(
            np.sort(np.concatenate([left, right])), np.sort(parent)):
        raise errors.DataError('Children do not partition the parent')
    return parent, left, right


def generalized_gain(d, parent, left, right, variant=PER_NODE_NORMALIZED):
    """Distance based information gain of splitting ``parent`` into ``left`` and ``right``.

    Sums run over ordered pairs of squared distances; index sets may repeat
    subjects (bootstrap samples).
    """
    parent, left, right = _check_partition(parent, left, right)
    values = d.values if isinstance(d, rfdm_dataset.DistanceMatrix) else np.asarray(d, dtype=float)
    sq = values ** 2
    s_p = _node_sum(sq, parent)
    s_l = _node_sum(sq, left)
    s_r = _node_sum(sq, right)
    return _gain(variant, s_p, len(parent), s_l, len(left), s_r, len(right))


def _gain(variant, s_p, n_p, s_l, n_l, s_r, n_r):
    if variant == LITERAL_EQ1:
        return -(s_p - s_l - s_r) / (2.0 * n_p)
    return s_p / (2.0 * n_p) - s_l / (2.0 * n_l) - s_r / (2.0 * n_r)


def _entropy(counts):
    counts = np.asarray(counts, dtype=float)
    total = counts.sum(axis=-1, keepdims=True)
    p = np.divide(counts, total, out=np.zeros_like(counts), where=total > 0)
    logp = np.log(p, out=np.zeros_like(p), where=p > 0)
    return -(p * logp).sum(axis=-1)


def shannon_gain(labels, parent, left, right):
    parent, left, right = _check_partition(parent, left, right)
    z = np.asarray(labels, dtype=np.int64)
    c = z.max() + 1
    h = [_entropy(np.bincount(z[idx], minlength=c)) for idx in (parent, left, right)]
    return float(h[0] - h[1] - h[2])


class Splitter(object):
    """Exhaustive split search over candidate features at one node."""

    def __init__(self, features, sq_distances, variant=PER_NODE_NORMALIZED, labels=None, discrete=None):
        self.features = np.asarray(features, dtype=float)
        self.sq = sq_distances
        self.variant = variant
        self.labels = None if labels is None else np.asarray(labels, dtype=np.int64)
        if variant == SHANNON and self.labels is None:
            raise errors.DataError('The shannon gain needs subject labels')
        if discrete is None:
            discrete = bool(np.isin(self.features, rfdm_dataset.GENOTYPE_LEVELS).all())
        self.discrete = discrete
        self.n_classes = 0 if self.labels is None else int(self.labels.max()) + 1

    def split(self, index_set, candidates):
        idx = np.asarray(index_set, dtype=np.int64)
        candidates = np.sort(np.asarray(candidates, dtype=np.int64))
        x = self.features[np.ix_(idx, candidates)]

        if self.variant == SHANNON:
            scored = [self._shannon_feature(x[:, k], idx) for k in range(len(candidates))]
        else:
            sub = self.sq[np.ix_(idx, idx)]
            total = sub.sum()
            if self.discrete:
                scored = self._genotype_features(x, sub, total)
            else:
                scored = [self._sorted_feature(x[:, k], sub, total) for k in range(len(candidates))]

        feats, points, gains = [], [], []
        for k, (pts, g) in enumerate(scored):
            feats.append(np.full(len(pts), candidates[k], dtype=np.int64))
            points.append(pts)
            gains.append(g)
        gains = np.concatenate(gains) if gains else np.zeros(0)
        if len(gains) == 0:
            return None
        points = np.concatenate(points)
        feats = np.concatenate(feats)

        best = gains.max()
        if self.variant != LITERAL_EQ1 and best <= 0:
            return None
        pick = int(np.argmax(gains >= best - defaults.TIE_TOLERANCE))
        return SplitCriterion(feats[pick], points[pick]), float(gains[pick])

    def _genotype_features(self, x, sub, total):
        n, m = x.shape
        codes = x.astype(np.int64)
        onehot = np.zeros((n, m, 3))
        onehot[np.arange(n)[:, None], np.arange(m)[None, :], codes] = 1.0
        weighted = sub.dot(onehot.reshape(n, 3 * m)).reshape(n, m, 3)
        blocks = np.einsum('imk,iml->mkl', onehot, weighted)
        counts = onehot.sum(axis=0)

        # cut after level 0: left {0}; cut after level 1: left {0, 1}
        s_left = np.stack([blocks[:, 0, 0], blocks[:, :2, :2].sum(axis=(1, 2))], axis=1)
        s_right = np.stack([blocks[:, 1:, 1:].sum(axis=(1, 2)), blocks[:, 2, 2]], axis=1)
        n_left = np.stack([counts[:, 0], counts[:, 0] + counts[:, 1]], axis=1)
        valid = np.stack([
            (counts[:, 0] > 0) & (counts[:, 1] + counts[:, 2] > 0),
            (counts[:, 1] > 0) & (counts[:, 2] > 0),
        ], axis=1)
        cut0_point = np.where(counts[:, 1] > 0, 0.5, 1.0)

        scored = []
        for k in range(m):
            pts, g = [], []
            for cut in (0, 1):
                if not valid[k, cut]:
                    continue
                pts.append(cut0_point[k] if cut == 0 else 1.5)
                g.append(_gain(self.variant, total, n,
                               s_left[k, cut], n_left[k, cut],
                               s_right[k, cut], n - n_left[k, cut]))
            scored.append((np.array(pts), np.array(g)))
        return scored

    @staticmethod
    def _boundaries(xs):
        pos = np.nonzero(xs[1:] != xs[:-1])[0]
        points = 0.5 * (xs[pos] + xs[pos + 1])
        # midpoint may round onto the upper value for adjacent floats
        points = np.where(points >= xs[pos + 1], xs[pos], points)
        return pos, points

    def _sorted_feature(self, xf, sub, total):
        order = np.argsort(xf, kind='mergesort')
        xs = xf[order]
        pos, points = self._boundaries(xs)
        if len(pos) == 0:
            return np.zeros(0), np.zeros(0)
        ms = sub[np.ix_(order, order)]
        diag = np.diag(ms)
        prefix = np.cumsum(2.0 * np.tril(ms, -1).sum(axis=1) + diag)
        suffix = np.cumsum((2.0 * np.triu(ms, 1).sum(axis=1) + diag)[::-1])[::-1]
        n = len(xf)
        n_left = pos + 1
        gains = np.array([
            _gain(self.variant, total, n, prefix[i], n_left[j], suffix[i + 1], n - n_left[j])
            for j, i in enumerate(pos)
        ])
        return points, gains

    def _shannon_feature(self, xf, idx):
        order = np.argsort(xf, kind='mergesort')
        xs = xf[order]
        pos, points = self._boundaries(xs)
        if len(pos) == 0:
            return np.zeros(0), np.zeros(0)
        z = self.labels[idx][order]
        onehot = np.zeros((len(z), self.n_classes))
        onehot[np.arange(len(z)), z] = 1.0
        cum = np.cumsum(onehot, axis=0)
        left = cum[pos]
        right = cum[-1][None, :] - left
        gains = _entropy(cum[-1]) - _entropy(left) - _entropy(right)
        return points, gains


def best_split(d, node, genotypes, candidates, variant=PER_NODE_NORMALIZED, labels=None):
    """Best (SplitCriterion, gain) for ``node`` over ``candidates``, or None for a leaf."""
    if isinstance(genotypes, rfdm_dataset.GenotypeMatrix):
        features = genotypes.values
    else:
        features = genotypes
    values = d.values if isinstance(d, rfdm_dataset.DistanceMatrix) else np.asarray(d, dtype=float)
    splitter = Splitter(features, values ** 2, variant=variant, labels=labels)
    index_set = node.index_set if isinstance(node, TreeNode) else node
    return splitter.split(index_set, candidates)


class _TreeGrower(object):
    def __init__(self, splitter, params, mtry, n_features, rng):
        self.splitter = splitter
        self.params = params
        self.mtry = mtry
        self.n_features = n_features
        self.rng = rng
        self.nodes = []

    def grow(self, index_set, depth):
        node_id = len(self.nodes)
        node = TreeNode(index_set, depth)
        self.nodes.append(node)
        if depth >= self.params.max_depth or node.size < 2 * self.params.min_node_size:
            return node_id

        node.candidates = np.sort(self.rng.choice(self.n_features, size=self.mtry, replace=False))
        found = self.splitter.split(node.index_set, node.candidates)
        if found is None:
            LOG.debug('Leaf at depth %d: no split among %d candidates', depth, self.mtry)
            return node_id

        node.split, node.gain = found
        goes_left = node.split.goes_left(self.splitter.features[node.index_set])
        node.left = self.grow(node.index_set[goes_left], depth + 1)
        node.right = self.grow(node.index_set[~goes_left], depth + 1)
        return node_id


def grow_tree(dataset, params, tree_seed=0):
    """Grow one tree on a bootstrap sample of ``dataset``.

    Randomness is drawn from the forest tree stream of ``tree_seed``: the
    bootstrap first, then the candidate features of each searched node in
    pre-order.
    """
    if dataset.distances is None:
        raise errors.DataError('Dataset has no distance matrix attached')
    n = dataset.n_subjects
    mtry = params.resolve_mtry(dataset.n_features)
    rng = rfdm_rng.generator(tree_seed, rfdm_rng.FOREST_TREE)

    in_bag = np.sort(rng.integers(0, n, size=n))
    splitter = Splitter(
        dataset.features,
        dataset.distances.values ** 2,
        variant=params.gain_variant,
        labels=dataset.labels,
        discrete=dataset.discrete,
    )
    grower = _TreeGrower(splitter, params, mtry, dataset.n_features, rng)
    grower.grow(in_bag, 0)
    return Tree(grower.nodes, in_bag, n, tree_seed=tree_seed)
