import numpy as np

from rfdm import defaults
from rfdm import errors
from rfdm.tools import dataset
from rfdm.tools import rng as rfdm_rng

MODELS = ['P0', 'P1', 'P2', 'P3', 'P4']


def model_topology(model_id, snps):
    """(pairs, singles) of a model over 16 ordered SNPs a1..a16."""
    a = [int(s) for s in snps]
    if len(a) != defaults.N_SELECTED_SNPS:
        raise errors.DataError('Models are defined over %d SNPs, got %d' % (defaults.N_SELECTED_SNPS, len(a)))
    chain = [(a[k], a[k + 1]) for k in range(8)]
    if model_id == 'P0':
        return [], a[:7]
    if model_id == 'P1':
        return [(a[2 * k], a[2 * k + 1]) for k in range(8)], []
    if model_id == 'P2':
        return [(a[0], a[k]) for k in range(1, 9)], []
    if model_id == 'P3':
        return chain, []
    if model_id == 'P4':
        return chain, a[9:16]
    raise errors.DataError('Unknown genetic model %r, choose from %s' % (model_id, MODELS))


class GeneticModel(object):
    def __init__(self, model, causal_set, spurious_set, pairs, singles,
                 spurious_pairs=(), spurious_singles=(),
                 delta=defaults.DELTA, gamma=defaults.GAMMA, zeta=0.0, spurious_delta=0.0):
        causal_set = [int(s) for s in causal_set]
        spurious_set = [int(s) for s in spurious_set]
        if set(causal_set) & set(spurious_set):
            raise errors.DataError('Causal and spurious SNP sets overlap')
        if zeta < 0:
            raise errors.DataError('zeta must be nonnegative')
        self.model = model
        self.causal_set = causal_set
        self.spurious_set = spurious_set
        self.pairs = [tuple(int(x) for x in p) for p in pairs]
        self.singles = [int(s) for s in singles]
        self.spurious_pairs = [tuple(int(x) for x in p) for p in spurious_pairs]
        self.spurious_singles = [int(s) for s in spurious_singles]
        self.delta = float(delta)
        self.gamma = float(gamma)
        self.zeta = float(zeta)
        self.spurious_delta = float(spurious_delta)

    @property
    def causal_snps(self):
        snps = set(self.singles)
        for a, b in self.pairs:
            snps.update((a, b))
        return sorted(snps)

    @property
    def causal_pairs(self):
        return sorted(tuple(sorted(p)) for p in self.pairs)

    def to_dict(self):
        return {
            'model': self.model,
            'causal_set': self.causal_set,
            'spurious_set': self.spurious_set,
            'pairs': [list(p) for p in self.pairs],
            'singles': self.singles,
            'spurious_pairs': [list(p) for p in self.spurious_pairs],
            'spurious_singles': self.spurious_singles,
            'delta': self.delta,
            'gamma': self.gamma,
            'zeta': self.zeta,
            'spurious_delta': self.spurious_delta,
        }


def build_genetic_model(model_id, causal, spurious, seed=defaults.SEED,
                        delta=defaults.DELTA, gamma=defaults.GAMMA, zeta=0.0, spurious_delta=0.0):
    """Draw the SNP ordering of a model; the spurious set always follows the chain model."""
    rng = rfdm_rng.generator(seed, rfdm_rng.GENETIC_MODEL)
    pairs, singles = model_topology(model_id, rng.permutation(np.asarray(causal)))
    s_pairs, s_singles = model_topology('P3', rng.permutation(np.asarray(spurious)))
    return GeneticModel(
        model_id, causal, spurious, pairs, singles,
        spurious_pairs=s_pairs, spurious_singles=s_singles,
        delta=delta, gamma=gamma, zeta=zeta, spurious_delta=spurious_delta,
    )


def _values(genotypes):
    if isinstance(genotypes, dataset.GenotypeMatrix):
        return genotypes.values.astype(float)
    return np.asarray(genotypes, dtype=float)


def genetic_load(genotypes, pairs, singles):
    x = _values(genotypes)
    load = np.zeros(x.shape[0])
    for a, b in pairs:
        load += x[:, a] * x[:, b]
    for c in singles:
        load += x[:, c]
    return load


def apply_vector_effect(y, genotypes, model, roi_set, spurious=False):
    if spurious:
        load = genetic_load(genotypes, model.spurious_pairs, model.spurious_singles)
        delta = model.spurious_delta
    else:
        load = genetic_load(genotypes, model.pairs, model.singles)
        delta = model.delta
    y_star = np.array(y, dtype=float)
    roi_set = np.asarray(roi_set, dtype=np.int64)
    y_star[:, roi_set] += delta * load[:, None]
    return y_star


def apply_covariance_effect(sigmas, genotypes, model):
    factors = np.exp(-model.gamma * genetic_load(genotypes, model.pairs, model.singles))
    return [np.asarray(s, dtype=float) * f for s, f in zip(sigmas, factors)]
