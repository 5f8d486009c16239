import pickle

import numpy as np

from rfdm import errors
from rfdm.forest import forest as rfdm_forest
from rfdm.forest import tree as rfdm_tree

FORMAT = 'rfdm-forest'
VERSION = 1


def _offsets(arrays):
    return np.concatenate([[0], np.cumsum([len(a) for a in arrays])]).astype(np.int64)


def _concat(arrays):
    return np.concatenate(arrays).astype(np.int64) if arrays else np.zeros(0, dtype=np.int64)


def tree_to_arrays(tree):
    nodes = tree.nodes
    feature, threshold, left, right = tree.routing_arrays()
    candidates = [n.candidates for n in nodes]
    indices = [n.index_set for n in nodes]
    return {
        'feature': feature,
        'threshold': threshold,
        'left': left,
        'right': right,
        'gain': np.array([n.gain for n in nodes]),
        'depth': np.array([n.depth for n in nodes], dtype=np.int64),
        'candidate_offsets': _offsets(candidates),
        'candidates': _concat(candidates),
        'index_offsets': _offsets(indices),
        'indices': _concat(indices),
        'in_bag': tree.in_bag,
        'n_subjects': tree.n_subjects,
        'tree_seed': tree.tree_seed,
    }


def tree_from_arrays(d):
    nodes = []
    co = d['candidate_offsets']
    io = d['index_offsets']
    for i in range(len(d['feature'])):
        split = None
        if d['feature'][i] != rfdm_tree.LEAF:
            split = rfdm_tree.SplitCriterion(d['feature'][i], d['threshold'][i])
        nodes.append(rfdm_tree.TreeNode(
            d['indices'][io[i]:io[i + 1]],
            int(d['depth'][i]),
            candidates=d['candidates'][co[i]:co[i + 1]],
            split=split,
            gain=d['gain'][i],
            left=int(d['left'][i]),
            right=int(d['right'][i]),
        ))
    return rfdm_tree.Tree(nodes, d['in_bag'], d['n_subjects'], tree_seed=d['tree_seed'])


def save_forest(forest, path):
    container = {
        'format': FORMAT,
        'version': VERSION,
        'params': forest.params.to_dict(),
        'n_subjects': forest.n_subjects,
        'n_features': forest.n_features,
        'feature_ids': forest.feature_ids,
        'features': None if forest.features is None else np.array(forest.features),
        'trees': [tree_to_arrays(t) for t in forest.trees],
    }
    with open(path, 'wb') as f:
        pickle.dump(container, f, protocol=2)


def load_forest(path):
    with open(path, 'rb') as f:
        container = pickle.load(f)
    if not isinstance(container, dict) or container.get('format') != FORMAT:
        raise errors.DataError('%s is not an rfdm forest' % path)
    if container.get('version') != VERSION:
        raise errors.DataError('Unsupported forest version %r in %s' % (container.get('version'), path))
    params = rfdm_tree.ForestParams.from_dict(container['params'])
    trees = [tree_from_arrays(t) for t in container['trees']]
    return rfdm_forest.Forest(
        trees, params, container['n_subjects'], container['n_features'],
        feature_ids=container.get('feature_ids'), features=container.get('features'),
    )
