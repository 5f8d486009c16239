import math

import numpy as np
import pytest

from rfdm import errors
from rfdm.forest import forest as rfdm_forest
from rfdm.forest import proximity as rfdm_proximity
from rfdm.forest import serialize
from rfdm.forest import tree as rfdm_tree
from rfdm.metric import distances
from rfdm.tools import dataset


def _sum_of_squares(y, idx):
    sub = y[idx]
    return ((sub - sub.mean(axis=0)) ** 2).sum()


def _gini_weighted(z, idx):
    counts = np.bincount(z[idx])
    p = counts / float(len(idx))
    return len(idx) * (1.0 - np.sum(p ** 2))


def _random_partition(rng, parent):
    while True:
        mask = rng.random(len(parent)) < 0.5
        if 0 < mask.sum() < len(parent):
            return parent[mask], parent[~mask]


def _gini_best_split(z, x, idx):
    found = []
    for f in range(x.shape[1]):
        values = np.unique(x[idx, f])
        for lo, hi in zip(values[:-1], values[1:]):
            point = 0.5 * (lo + hi)
            left = idx[x[idx, f] <= point]
            right = idx[x[idx, f] > point]
            g = 0.5 * (_gini_weighted(z, idx) - _gini_weighted(z, left) - _gini_weighted(z, right))
            found.append((f, point, g))
    if not found:
        return None
    top = max(g for _, _, g in found)
    for f, point, g in found:
        if g >= top - 1e-12:
            return f, point, g


def _dataset(n=60, p=8, seed=0, causal=0):
    rng = np.random.default_rng(seed)
    x = rng.integers(0, 3, size=(n, p))
    y = np.stack([x[:, causal] * 2.0, rng.normal(size=n) * 0.1], axis=1)
    g = dataset.GenotypeMatrix(x)
    return dataset.Dataset(g, distances.euclidean_distances(y))


def test_gain_closed_forms():
    assert rfdm_tree.generalized_gain(np.zeros((3, 3)), [0, 1, 2], [0], [1, 2]) == 0.0
    d = np.array([[0.0, 2.0], [2.0, 0.0]])
    assert rfdm_tree.generalized_gain(d, [0, 1], [0], [1]) == pytest.approx(2.0)

    y = np.array([[0.0], [1.0], [4.0]])
    d = distances.euclidean_distances(y)
    assert rfdm_tree.generalized_gain(d, [0, 1, 2], [0, 1], [2]) == pytest.approx(26.0 / 3 - 0.5)

    d = distances.discrete_distances([0, 0, 1, 1])
    assert rfdm_tree.generalized_gain(d, [0, 1, 2, 3], [0, 1], [2, 3]) == pytest.approx(1.0)


def test_gain_rejects_empty_child():
    with pytest.raises(errors.DataError):
        rfdm_tree.generalized_gain(np.zeros((2, 2)), [0, 1], [], [0, 1])


def test_gain_rejects_foreign_children():
    d = np.zeros((4, 4))
    with pytest.raises(errors.DataError):
        rfdm_tree.generalized_gain(d, [0, 1, 2], [0], [1, 3])
    with pytest.raises(errors.DataError):
        rfdm_tree.generalized_gain(d, [0, 0, 1], [0], [1, 1])
    assert rfdm_tree.generalized_gain(d, [0, 0, 1], [1], [0, 0]) == 0.0


def test_literal_gain_is_nonpositive():
    y = np.array([[0.0], [1.0], [4.0], [6.0]])
    d = distances.euclidean_distances(y)
    g = rfdm_tree.generalized_gain(d, [0, 1, 2, 3], [0, 1], [2, 3], variant=rfdm_tree.LITERAL_EQ1)
    assert g < 0


def test_euclidean_reduction():
    rng = np.random.default_rng(11)
    for _ in range(1000):
        n = rng.integers(2, 51)
        q = rng.integers(1, 9)
        y = rng.normal(size=(n, q)) * rng.uniform(0.1, 5.0)
        d = distances.euclidean_distances(y)
        parent = rng.integers(0, n, size=n) if rng.random() < 0.5 else np.arange(n)
        left, right = _random_partition(rng, parent)
        expected = _sum_of_squares(y, parent) - _sum_of_squares(y, left) - _sum_of_squares(y, right)
        got = rfdm_tree.generalized_gain(d, parent, left, right)
        assert abs(got - expected) <= 1e-9 * max(1.0, _sum_of_squares(y, parent))


def test_classification_reduction():
    rng = np.random.default_rng(5)
    for trial in range(1000):
        n = rng.integers(4, 41)
        c = rng.integers(2, 5)
        z = rng.integers(0, c, size=n)
        d = distances.discrete_distances(z)
        parent = rng.integers(0, n, size=n) if trial % 2 else np.arange(n)
        left, right = _random_partition(rng, parent)
        expected = 0.5 * (_gini_weighted(z, parent) - _gini_weighted(z, left) - _gini_weighted(z, right))
        assert abs(rfdm_tree.generalized_gain(d, parent, left, right) - expected) <= 1e-12

        p = rng.integers(1, 6)
        if trial % 3 == 0:
            x = rng.normal(size=(n, p))
        else:
            x = rng.integers(0, 3, size=(n, p)).astype(float)
        oracle = _gini_best_split(z, x, parent)
        found = rfdm_tree.best_split(d, parent, x, np.arange(p))
        if oracle is None or oracle[2] <= 1e-9:
            assert found is None or found[1] <= 1e-9
            continue
        split, gain = found
        assert (split.feature, split.split_point) == (oracle[0], oracle[1])
        assert abs(gain - oracle[2]) <= 1e-12


def test_best_split_edge_cases():
    d = distances.discrete_distances([0, 0, 1, 1])
    constant = np.ones((4, 3))
    assert rfdm_tree.best_split(d, np.arange(4), constant, [0, 1, 2]) is None

    x = np.array([[0, 0, 2], [0, 0, 1], [2, 2, 0], [2, 2, 1]])
    split, gain = rfdm_tree.best_split(d, np.arange(4), x, [0, 1, 2])
    assert split.feature == 0
    assert split.split_point == 1.0
    assert gain == pytest.approx(1.0)


def test_separating_feature_is_chosen():
    rng = np.random.default_rng(2)
    x = rng.integers(0, 3, size=(40, 6))
    x[:, 4] = np.repeat([0, 2], 20)
    y = (x[:, 4] > 0).astype(float).reshape(-1, 1)
    d = distances.euclidean_distances(y)
    split, _ = rfdm_tree.best_split(d, np.arange(40), x, np.arange(6))
    assert split.feature == 4


def test_mtry_defaults():
    assert rfdm_tree.ForestParams().resolve_mtry(385) == 129
    params = rfdm_tree.ForestParams(task='classification')
    assert params.resolve_mtry(385) == int(math.ceil(math.sqrt(385)))
    with pytest.raises(errors.DataError):
        rfdm_tree.ForestParams(mtry=20).resolve_mtry(10)


def test_forest_params_dict():
    params = rfdm_tree.ForestParams(n_trees=3, mtry=2)
    assert rfdm_tree.ForestParams.from_dict(params.to_dict()).to_dict() == params.to_dict()
    with pytest.raises(errors.DataError):
        rfdm_tree.ForestParams.from_dict({'trees': 3})


def _walk(tree, node_id, index_set, out):
    node = tree.nodes[node_id]
    assert node.depth <= 7
    if node.is_leaf:
        return
    left, right = tree.children(node)
    assert sorted(np.concatenate([left.index_set, right.index_set])) == sorted(node.index_set)
    assert left.depth == right.depth == node.depth + 1
    out.append(node)
    _walk(tree, node.left, left.index_set, out)
    _walk(tree, node.right, right.index_set, out)


def test_tree_structure():
    ds = _dataset()
    params = rfdm_tree.ForestParams(n_trees=1, mtry=3, max_depth=7, min_node_size=3)
    tree = rfdm_tree.grow_tree(ds, params, tree_seed=9)
    assert len(tree.in_bag) == ds.n_subjects
    assert not set(tree.oob) & set(tree.in_bag)
    internal = []
    _walk(tree, 0, tree.root.index_set, internal)
    assert internal
    for node in internal:
        assert node.size >= 6
        assert node.gain > 0
        assert len(node.candidates) == 3
        assert node.split.feature in node.candidates


def test_tree_stopping_rules():
    ds = _dataset()
    stump = rfdm_tree.grow_tree(ds, rfdm_tree.ForestParams(n_trees=1, max_depth=0), tree_seed=1)
    assert len(stump.nodes) == 1 and stump.root.is_leaf

    big = rfdm_tree.grow_tree(ds, rfdm_tree.ForestParams(n_trees=1, min_node_size=40), tree_seed=1)
    assert len(big.nodes) == 1


def test_literal_variant_splits_constant_responses():
    x = np.random.default_rng(0).integers(0, 3, size=(30, 4))
    ds = dataset.Dataset(dataset.GenotypeMatrix(x), np.zeros((30, 30)))
    normalized = rfdm_tree.grow_tree(ds, rfdm_tree.ForestParams(n_trees=1, mtry=4), tree_seed=0)
    assert normalized.root.is_leaf
    literal = rfdm_tree.grow_tree(
        ds, rfdm_tree.ForestParams(n_trees=1, mtry=4, gain_variant='literal_eq1'), tree_seed=0,
    )
    assert not literal.root.is_leaf
    assert literal.root.gain <= 0


def test_tree_determinism():
    ds = _dataset()
    params = rfdm_tree.ForestParams(n_trees=1, mtry=3)
    a = serialize.tree_to_arrays(rfdm_tree.grow_tree(ds, params, tree_seed=4))
    b = serialize.tree_to_arrays(rfdm_tree.grow_tree(ds, params, tree_seed=4))
    for key in ('feature', 'threshold', 'gain', 'indices', 'candidates'):
        np.testing.assert_array_equal(a[key], b[key])


def test_shannon_gain():
    gain = rfdm_tree.shannon_gain([0, 0, 1, 1], [0, 1, 2, 3], [0, 1], [2, 3])
    assert gain == pytest.approx(math.log(2.0))


def test_shannon_variant_needs_labels():
    ds = _dataset()
    params = rfdm_tree.ForestParams(n_trees=2, gain_variant='shannon')
    with pytest.raises(errors.DataError):
        rfdm_forest.grow_forest(ds, params)

    labels = (ds.features[:, 0] > 0).astype(int)
    labelled = dataset.Dataset(ds.genotypes, distances.discrete_distances(labels), labels=labels)
    f = rfdm_forest.grow_forest(labelled, params.replace(mtry=8))
    assert f.trees[0].root.split.feature == 0
    assert f.trees[0].root.split.split_point == 0.5


def _forest_arrays(f):
    return [serialize.tree_to_arrays(t) for t in f.trees]


def test_forest_is_independent_of_jobs():
    ds = _dataset()
    serial = rfdm_forest.grow_forest(ds, rfdm_tree.ForestParams(n_trees=6, mtry=3, seed=3, n_jobs=1))
    parallel = rfdm_forest.grow_forest(ds, rfdm_tree.ForestParams(n_trees=6, mtry=3, seed=3, n_jobs=2))
    for a, b in zip(_forest_arrays(serial), _forest_arrays(parallel)):
        for key in ('feature', 'threshold', 'gain', 'in_bag'):
            np.testing.assert_array_equal(a[key], b[key])


def test_forest_of_one_tree_is_grow_tree():
    ds = _dataset()
    params = rfdm_tree.ForestParams(n_trees=1, mtry=3, seed=8)
    f = rfdm_forest.grow_forest(ds, params)
    t = rfdm_tree.grow_tree(ds, params, tree_seed=rfdm_forest.tree_seeds(params)[0])
    np.testing.assert_array_equal(serialize.tree_to_arrays(f.trees[0])['gain'], serialize.tree_to_arrays(t)['gain'])


def test_single_leaf_proximity():
    ds = dataset.Dataset(dataset.GenotypeMatrix([[0], [1]]), np.zeros((2, 2)))
    leaf = rfdm_tree.TreeNode([0, 0], 0)
    tree = rfdm_tree.Tree([leaf], [0, 0], 2)
    f = rfdm_forest.Forest([tree], rfdm_tree.ForestParams(n_trees=1), 2, 1)
    w = rfdm_proximity.proximity(f, ds)
    # subject 1 is the only OOB subject, so the pair is never jointly OOB
    assert w.values[0, 1] == 0.0
    assert w.never_joint.tolist() == [[0, 1]]

    both_oob = rfdm_tree.Tree([rfdm_tree.TreeNode([], 0)], [], 2)
    f = rfdm_forest.Forest([both_oob], rfdm_tree.ForestParams(n_trees=1), 2, 1)
    assert rfdm_proximity.proximity(f, ds).values[0, 1] == 1.0


def _leaf_of(tree, x):
    node = tree.root
    while not node.is_leaf:
        node = tree.nodes[node.left] if x[node.split.feature] <= node.split.split_point else tree.nodes[node.right]
    return id(node)


def test_proximity_matches_enumeration():
    ds = _dataset(n=20, p=5, seed=4)
    f = rfdm_forest.grow_forest(ds, rfdm_tree.ForestParams(n_trees=50, mtry=2, min_node_size=2, seed=6))
    w = rfdm_proximity.proximity(f, ds)
    same = np.zeros((20, 20))
    joint = np.zeros((20, 20))
    for tree in f.trees:
        oob = set(tree.oob.tolist())
        for i in range(20):
            for j in range(20):
                if i in oob and j in oob:
                    joint[i, j] += 1
                    same[i, j] += _leaf_of(tree, ds.features[i]) == _leaf_of(tree, ds.features[j])
    expected = np.where(joint > 0, same / np.maximum(joint, 1), 0.0)
    np.fill_diagonal(expected, 1.0)
    np.testing.assert_array_equal(w.values, expected)
    np.testing.assert_array_equal(w.values, w.values.T)


def test_forest_file(tmp_path):
    ds = _dataset()
    f = rfdm_forest.grow_forest(ds, rfdm_tree.ForestParams(n_trees=4, mtry=3))
    path = str(tmp_path / 'forest.bin')
    serialize.save_forest(f, path)
    loaded = serialize.load_forest(path)
    assert loaded.params.to_dict() == f.params.to_dict()
    assert loaded.feature_ids == f.feature_ids
    np.testing.assert_array_equal(loaded.apply(ds.features), f.apply(ds.features))
    np.testing.assert_array_equal(loaded.features, ds.features)
    np.testing.assert_array_equal(
        rfdm_proximity.proximity(loaded).values, rfdm_proximity.proximity(f, ds).values,
    )

    bare = rfdm_forest.Forest(f.trees, f.params, f.n_subjects, f.n_features)
    with pytest.raises(errors.DataError):
        rfdm_proximity.proximity(bare)


def test_load_forest_rejects_other_pickles(tmp_path):
    import pickle
    path = str(tmp_path / 'other.bin')
    with open(path, 'wb') as fh:
        pickle.dump({'format': 'something-else'}, fh, protocol=2)
    with pytest.raises(errors.DataError):
        serialize.load_forest(path)
