import csv
import logging

import numpy as np

from rfdm import errors

LOG = logging.getLogger(__name__)

SQUARED = 'squared'
ABSOLUTE = 'absolute'
PAIR_VARIANTS = [SQUARED, ABSOLUTE]


class ImportanceReport(object):
    def __init__(self, scores, candidacy, selections, feature_ids=None):
        self.scores = np.asarray(scores, dtype=float)
        self.candidacy = np.asarray(candidacy, dtype=np.int64)
        self.selections = np.asarray(selections, dtype=np.int64)
        self.feature_ids = list(feature_ids) if feature_ids is not None else [
            'f%d' % i for i in range(len(self.scores))
        ]

    @property
    def n_features(self):
        return len(self.scores)


class PairInteractionReport(object):
    """``conditional[a, b]`` is the gain imbalance of b-splits beneath a-splits."""

    def __init__(self, conditional, feature_ids=None, variant=SQUARED):
        self.conditional = np.asarray(conditional, dtype=float)
        self.variant = variant
        p = self.conditional.shape[0]
        self.feature_ids = list(feature_ids) if feature_ids is not None else ['f%d' % i for i in range(p)]

    @property
    def n_features(self):
        return self.conditional.shape[0]

    def score(self, a, b):
        return self.conditional[a, b] + self.conditional[b, a]

    def pairs(self):
        """All (a, b) with a < b and their scores."""
        a, b = np.triu_indices(self.n_features, k=1)
        return a, b, self.conditional[a, b] + self.conditional[b, a]


def gini_importance(forest):
    p = forest.n_features
    gain_sum = np.zeros(p)
    candidacy = np.zeros(p, dtype=np.int64)
    selections = np.zeros(p, dtype=np.int64)
    for tree in forest.trees:
        for node in tree.nodes:
            np.add.at(candidacy, node.candidates, 1)
            if not node.is_leaf:
                gain_sum[node.split.feature] += node.gain
                selections[node.split.feature] += 1
    scores = np.zeros(p)
    seen = candidacy > 0
    scores[seen] = gain_sum[seen] / candidacy[seen]
    return ImportanceReport(scores, candidacy, selections, feature_ids=forest.feature_ids)


def subtree_gains(tree, n_features):
    """Per node, the per-feature sum of split gains in the subtree rooted there."""
    sums = np.zeros((len(tree.nodes), n_features))
    # pre-order ids: children always follow their parent
    for i in range(len(tree.nodes) - 1, -1, -1):
        node = tree.nodes[i]
        if node.is_leaf:
            continue
        sums[i] = sums[node.left] + sums[node.right]
        sums[i, node.split.feature] += node.gain
    return sums


def tree_interaction(tree, n_features, variant=SQUARED):
    conditional = np.zeros((n_features, n_features))
    sums = subtree_gains(tree, n_features)
    for node in tree.nodes:
        if node.is_leaf:
            continue
        left, right = tree.children(node)
        if left.is_leaf and right.is_leaf:
            continue
        diff = (node.size / float(left.size)) * sums[node.left] - (node.size / float(right.size)) * sums[node.right]
        conditional[node.split.feature] += diff ** 2 if variant == SQUARED else np.abs(diff)
    return conditional


def pairwise_interaction(forest, variant=SQUARED):
    if variant not in PAIR_VARIANTS:
        raise errors.DataError('Unknown pair variant %r' % variant)
    p = forest.n_features
    conditional = np.zeros((p, p))
    for tree in forest.trees:
        conditional += tree_interaction(tree, p, variant=variant)
    conditional *= 0.5
    return PairInteractionReport(conditional, feature_ids=forest.feature_ids, variant=variant)


def rank(report):
    """Descending by score, ties by ascending index."""
    if isinstance(report, PairInteractionReport):
        a, b, scores = report.pairs()
        order = np.lexsort((b, a, -scores))
        return [((int(a[i]), int(b[i])), float(scores[i])) for i in order]
    scores = report.scores
    order = np.lexsort((np.arange(len(scores)), -scores))
    return [(int(i), float(scores[i])) for i in order]


def save_ranking(report, path):
    ranked = rank(report)
    ids = report.feature_ids
    with open(path, 'w') as f:
        w = csv.writer(f, delimiter='\t', lineterminator='\n')
        if isinstance(report, PairInteractionReport):
            w.writerow(['rank', 'score', 'id_a', 'id_b'])
            for r, ((a, b), score) in enumerate(ranked):
                w.writerow([r + 1, repr(score), ids[a], ids[b]])
        else:
            w.writerow(['rank', 'score', 'id', 'g_alpha'])
            for r, (a, score) in enumerate(ranked):
                w.writerow([r + 1, repr(score), ids[a], int(report.candidacy[a])])
    LOG.info('Wrote %d ranked items to %s', len(ranked), path)


def load_ranking(path):
    """Ranked items as (id or (id_a, id_b), score), in file order."""
    with open(path) as f:
        rows = list(csv.reader(f, delimiter='\t'))
    if not rows:
        raise errors.EmptyInput('Empty ranking %s' % path)
    header, body = rows[0], rows[1:]
    if header[:2] != ['rank', 'score']:
        raise errors.DataError('%s is not a ranking file' % path)
    pairs = 'id_b' in header
    ranked = []
    for row in body:
        item = (row[2], row[3]) if pairs else row[2]
        ranked.append((item, float(row[1])))
    return ranked
