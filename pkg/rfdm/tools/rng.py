"""Named random streams.

Every random draw in rfdm comes from a Philox generator keyed by the master
seed and a spawn key ``(stream, index...)``. Streams are independent of the
order in which work is scheduled.
"""
import numpy as np

FOREST_TREE = 1
FOUNDERS = 10
GENERATION = 11
SNP_SETS = 12
GENETIC_MODEL = 13
ROI = 14
REFERENCE = 15
BASE_VECTORS = 16
DISEASE = 17
STUDY = 18
COVARIANCE = 19
TRIANGLE_SAMPLING = 20
ITERATION = 30


def generator(seed, stream, *index):
    if seed is None:
        seed = 0
    ss = np.random.SeedSequence(int(seed), spawn_key=(int(stream),) + tuple(int(i) for i in index))
    return np.random.Generator(np.random.Philox(ss))


def derive_seed(seed, stream, *index):
    """Derive a child 32-bit seed, used where a library wants an integer seed."""
    ss = np.random.SeedSequence(int(seed), spawn_key=(int(stream),) + tuple(int(i) for i in index))
    return int(ss.generate_state(1)[0])
