import logging

from rfdm import defaults
from rfdm.forest import forest as rfdm_forest
from rfdm.forest import proximity as rfdm_proximity
from rfdm.manifold import eigenmap
from rfdm.metric import distances
from rfdm.tools import dataset

LOG = logging.getLogger(__name__)


def classification_forest(labels, vectors, params):
    """Forest on phenotype vectors with the 0/1 label metric as response distance."""
    ds = dataset.Dataset(vectors, distances.discrete_distances(labels), labels=labels)
    params = params.replace(task=defaults.TASK_CLASSIFICATION)
    return rfdm_forest.grow_forest(ds, params), ds


def supervised_proximity(labels, vectors, params):
    forest, ds = classification_forest(labels, vectors, params)
    return rfdm_proximity.proximity(forest, ds)


def supervised_distance(labels, vectors, params, m=defaults.DIMS):
    w = supervised_proximity(labels, vectors, params)
    LOG.info('Supervised manifold of %d subjects in %d dimensions', w.n, m)
    return eigenmap.proximity_distance(w, m=m)
