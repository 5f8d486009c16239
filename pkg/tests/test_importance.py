import numpy as np
import pytest

from rfdm.forest import forest as rfdm_forest
from rfdm.forest import serialize
from rfdm.forest import tree as rfdm_tree
from rfdm.importance import gini
from rfdm.metric import distances
from rfdm.tools import dataset


def _node(index_set, depth, candidates=None, feature=None, gain=0.0, left=rfdm_tree.LEAF, right=rfdm_tree.LEAF):
    split = None if feature is None else rfdm_tree.SplitCriterion(feature, 0.5)
    return rfdm_tree.TreeNode(index_set, depth, candidates=candidates, split=split, gain=gain, left=left, right=right)


def _hand_forest():
    # root splits feature 0 (8 -> 4/4); its left child splits feature 1 with gain 1.0
    nodes = [
        _node(range(8), 0, [0, 1], feature=0, gain=3.0, left=1, right=4),
        _node(range(4), 1, [1], feature=1, gain=1.0, left=2, right=3),
        _node([0, 1], 2),
        _node([2, 3], 2),
        _node(range(4, 8), 1),
    ]
    tree = rfdm_tree.Tree(nodes, np.arange(8), 8)
    return rfdm_forest.Forest([tree], rfdm_tree.ForestParams(n_trees=1), 8, 3)


def _grown_forest(n_trees=30, seed=0):
    rng = np.random.default_rng(seed)
    x = rng.integers(0, 3, size=(80, 10))
    y = np.stack([x[:, 2] * x[:, 5], rng.normal(size=80)], axis=1).astype(float)
    ds = dataset.Dataset(dataset.GenotypeMatrix(x), distances.euclidean_distances(y))
    return rfdm_forest.grow_forest(ds, rfdm_tree.ForestParams(n_trees=n_trees, mtry=4, min_node_size=3, seed=seed))


def test_gini_importance_hand_tree():
    report = gini.gini_importance(_hand_forest())
    np.testing.assert_allclose(report.scores, [3.0, 0.5, 0.0])
    np.testing.assert_array_equal(report.candidacy, [1, 2, 0])
    np.testing.assert_array_equal(report.selections, [1, 1, 0])


def test_gini_importance_single_split():
    nodes = [
        _node(range(4), 0, [1], feature=1, gain=2.0, left=1, right=2),
        _node([0, 1], 1),
        _node([2, 3], 1),
    ]
    forest = rfdm_forest.Forest([rfdm_tree.Tree(nodes, np.arange(4), 4)], rfdm_tree.ForestParams(n_trees=1), 4, 2)
    report = gini.gini_importance(forest)
    assert report.scores[1] == 2.0
    assert report.scores[0] == 0.0


def test_gini_importance_matches_node_walk():
    forest = _grown_forest()
    gain = np.zeros(10)
    candidacy = np.zeros(10)
    for tree in forest.trees:
        for node in tree.nodes:
            for c in node.candidates:
                candidacy[c] += 1
            if not node.is_leaf:
                gain[node.split.feature] += node.gain
    expected = np.where(candidacy > 0, gain / np.maximum(candidacy, 1), 0.0)
    report = gini.gini_importance(forest)
    np.testing.assert_allclose(report.scores, expected, rtol=1e-12)
    assert np.all(report.candidacy >= report.selections)


def test_pairwise_hand_tree():
    report = gini.pairwise_interaction(_hand_forest())
    assert report.conditional[0, 1] == pytest.approx(2.0)
    assert report.score(0, 1) == pytest.approx(2.0)
    assert report.score(1, 0) == report.score(0, 1)
    assert report.score(0, 2) == 0.0
    assert report.score(1, 2) == 0.0

    absolute = gini.pairwise_interaction(_hand_forest(), variant=gini.ABSOLUTE)
    assert absolute.score(0, 1) == pytest.approx(1.0)


def test_pairwise_scaling():
    forest = _grown_forest(n_trees=5)
    before = gini.pairwise_interaction(forest).conditional
    importance_before = gini.gini_importance(forest).scores
    for tree in forest.trees:
        for node in tree.nodes:
            node.gain *= 3.0
    np.testing.assert_allclose(
        gini.pairwise_interaction(forest).conditional, 9.0 * before, rtol=1e-9, atol=1e-10 * before.max(),
    )
    np.testing.assert_allclose(gini.gini_importance(forest).scores, 3.0 * importance_before, rtol=1e-12)


def test_reports_survive_serialization(tmp_path):
    forest = _grown_forest(n_trees=5)
    path = str(tmp_path / 'forest.bin')
    serialize.save_forest(forest, path)
    loaded = serialize.load_forest(path)
    np.testing.assert_array_equal(gini.gini_importance(loaded).scores, gini.gini_importance(forest).scores)
    np.testing.assert_array_equal(
        gini.pairwise_interaction(loaded).conditional, gini.pairwise_interaction(forest).conditional,
    )


def test_rank_orders():
    report = gini.ImportanceReport([3.0, 1.0, 2.0], [1, 1, 1], [1, 1, 1])
    assert [i for i, _ in gini.rank(report)] == [0, 2, 1]
    zeros = gini.ImportanceReport(np.zeros(4), np.zeros(4), np.zeros(4))
    assert [i for i, _ in gini.rank(zeros)] == [0, 1, 2, 3]


def test_pair_universe():
    report = gini.PairInteractionReport(np.zeros((385, 385)))
    ranked = gini.rank(report)
    assert len(ranked) == 73920
    assert ranked[0][0] == (0, 1)
    assert ranked[1][0] == (0, 2)


def test_ranking_file(tmp_path):
    report = gini.gini_importance(_hand_forest())
    path = str(tmp_path / 'snps.tsv')
    gini.save_ranking(report, path)
    with open(path) as f:
        assert f.readline().strip().split('\t') == ['rank', 'score', 'id', 'g_alpha']
    ranked = gini.load_ranking(path)
    assert [item for item, _ in ranked] == ['f0', 'f1', 'f2']
    assert ranked[0][1] == 3.0

    pairs = gini.pairwise_interaction(_hand_forest())
    path = str(tmp_path / 'pairs.tsv')
    gini.save_ranking(pairs, path)
    ranked = gini.load_ranking(path)
    assert ranked[0] == (('f0', 'f1'), 2.0)
    assert len(ranked) == 3


@pytest.mark.slow
def test_interacting_pair_ranks_first():
    hits = 0
    for run in range(8):
        rng = np.random.default_rng(100 + run)
        x = rng.integers(0, 3, size=(200, 20))
        parity = (x[:, 3] * x[:, 11]) % 2
        d = distances.discrete_distances(parity)
        ds = dataset.Dataset(dataset.GenotypeMatrix(x), d)
        forest = rfdm_forest.grow_forest(ds, rfdm_tree.ForestParams(n_trees=300, seed=run))
        top = gini.rank(gini.pairwise_interaction(forest))[0][0]
        hits += top == (3, 11)
    assert hits >= 7
