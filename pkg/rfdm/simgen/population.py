import logging

import numpy as np

from rfdm import defaults
from rfdm import errors
from rfdm.tools import dataset
from rfdm.tools import rng as rfdm_rng

LOG = logging.getLogger(__name__)


class PopulationConfig(object):
    def __init__(self,
                 n_founders=defaults.N_FOUNDERS,
                 n_generations=defaults.N_GENERATIONS,
                 final_size=defaults.FINAL_SIZE,
                 n_loci=defaults.N_LOCI,
                 recomb_rate=defaults.RECOMB_RATE,
                 mutation_rate=defaults.MUTATION_RATE,
                 founder_maf_range=defaults.FOUNDER_MAF_RANGE,
                 founder_ld_block=defaults.FOUNDER_LD_BLOCK,
                 founder_ld_strength=defaults.FOUNDER_LD_STRENGTH,
                 seed=defaults.SEED):
        for name, rate in (('recomb_rate', recomb_rate), ('mutation_rate', mutation_rate),
                           ('founder_ld_strength', founder_ld_strength)):
            if not 0.0 <= rate <= 1.0:
                raise errors.DataError('%s must lie in [0, 1], got %r' % (name, rate))
        if n_founders < 1 or n_loci < 1 or n_generations < 0 or founder_ld_block < 1:
            raise errors.DataError('Population sizes, loci and block length must be positive')
        if final_size < n_founders:
            raise errors.DataError('final_size %d is below n_founders %d' % (final_size, n_founders))
        low, high = founder_maf_range
        if not 0.0 <= low <= high <= 1.0:
            raise errors.DataError('Invalid founder MAF range %r' % (founder_maf_range,))
        self.n_founders = int(n_founders)
        self.n_generations = int(n_generations)
        self.final_size = int(final_size)
        self.n_loci = int(n_loci)
        self.recomb_rate = float(recomb_rate)
        self.mutation_rate = float(mutation_rate)
        self.founder_maf_range = (float(low), float(high))
        self.founder_ld_block = int(founder_ld_block)
        self.founder_ld_strength = float(founder_ld_strength)
        self.seed = int(seed)

    def to_dict(self):
        d = dict(self.__dict__)
        d['founder_maf_range'] = list(self.founder_maf_range)
        return d

    @classmethod
    def from_dict(cls, d):
        unknown = set(d) - set(cls().to_dict())
        if unknown:
            raise errors.DataError('Unknown population key(s): %s' % ', '.join(sorted(unknown)))
        d = dict(d)
        if 'founder_maf_range' in d:
            d['founder_maf_range'] = tuple(d['founder_maf_range'])
        return cls(**d)


def make_founders(config, rng=None):
    """Founder haplotypes, shape (n_founders, 2, n_loci), alleles 0/1.

    Loci are grouped in blocks sharing an allele frequency. Within a block
    each haplotype reuses one latent uniform draw with probability
    ``founder_ld_strength``, which correlates alleles inside the block.
    """
    if rng is None:
        rng = rfdm_rng.generator(config.seed, rfdm_rng.FOUNDERS)
    n_hap = 2 * config.n_founders
    low, high = config.founder_maf_range
    haps = np.zeros((n_hap, config.n_loci), dtype=np.uint8)
    for start in range(0, config.n_loci, config.founder_ld_block):
        stop = min(start + config.founder_ld_block, config.n_loci)
        freq = rng.uniform(low, high)
        shared = rng.random(n_hap)
        fresh = rng.random((n_hap, stop - start))
        reuse = rng.random((n_hap, stop - start)) < config.founder_ld_strength
        latent = np.where(reuse, shared[:, None], fresh)
        haps[:, start:stop] = latent < freq
    return haps.reshape(config.n_founders, 2, config.n_loci)


def generation_sizes(config):
    """Population size after each generation, geometric from n_founders to final_size."""
    g = config.n_generations
    if g == 0:
        return []
    ratio = config.final_size / float(config.n_founders)
    sizes = [int(round(config.n_founders * ratio ** (k / float(g)))) for k in range(1, g + 1)]
    sizes[-1] = config.final_size
    return sizes


def _gametes(haps, parents, config, rng):
    n_new = len(parents)
    n_loci = haps.shape[2]
    start = rng.integers(0, 2, size=n_new)
    if config.recomb_rate > 0 and n_loci > 1:
        crossovers = rng.random((n_new, n_loci - 1)) < config.recomb_rate
        switches = np.concatenate([np.zeros((n_new, 1), dtype=np.int64), np.cumsum(crossovers, axis=1)], axis=1)
        phase = (start[:, None] + switches) % 2
    else:
        phase = np.repeat(start[:, None], n_loci, axis=1)
    return haps[parents[:, None], phase, np.arange(n_loci)[None, :]]


def evolve(haps, config, seed=None):
    """Wright-Fisher generations: random parents, one recombinant gamete each, symmetric mutation."""
    seed = config.seed if seed is None else seed
    for g, size in enumerate(generation_sizes(config)):
        rng = rfdm_rng.generator(seed, rfdm_rng.GENERATION, g)
        parents = rng.integers(0, haps.shape[0], size=(size, 2))
        child = np.stack([
            _gametes(haps, parents[:, 0], config, rng),
            _gametes(haps, parents[:, 1], config, rng),
        ], axis=1)
        if config.mutation_rate > 0:
            child ^= (rng.random(child.shape) < config.mutation_rate).astype(np.uint8)
        haps = child
        if (g + 1) % 10 == 0 or g + 1 == config.n_generations:
            LOG.info('Generation %d/%d: %d individuals', g + 1, config.n_generations, size)
    return haps


def minor_allele_counts(haps):
    """Diploid minor allele counts and per-locus MAF."""
    counts = haps.sum(axis=1).astype(np.int8)
    freq = counts.mean(axis=0) / 2.0
    flip = freq > 0.5
    counts[:, flip] = 2 - counts[:, flip]
    return counts, np.minimum(freq, 1.0 - freq)


def simulate_genotypes(config):
    founders = make_founders(config)
    haps = evolve(founders, config)
    counts, maf = minor_allele_counts(haps)
    genotypes = dataset.GenotypeMatrix(
        counts,
        snp_ids=['rs%d' % (i + 1) for i in range(config.n_loci)],
        subject_ids=['ind%d' % i for i in range(counts.shape[0])],
    )
    LOG.info('Simulated %d individuals x %d loci, %d monomorphic', counts.shape[0], config.n_loci,
             int(np.sum(maf == 0)))
    return genotypes, maf


class SnpSets(object):
    def __init__(self, causal, spurious, causal_window, spurious_window):
        self.causal = np.asarray(causal, dtype=np.int64)
        self.spurious = np.asarray(spurious, dtype=np.int64)
        self.causal_window = tuple(causal_window)
        self.spurious_window = tuple(spurious_window)

    def to_dict(self):
        return {
            'causal': self.causal.tolist(),
            'spurious': self.spurious.tolist(),
            'causal_window': list(self.causal_window),
            'spurious_window': list(self.spurious_window),
        }


def _pick_window(maf, window, exclude, n_select, step, rng, kind):
    low, high = window
    k = 0
    while True:
        lo, hi = low - k * step, high + k * step
        eligible = np.setdiff1d(np.nonzero((maf > lo) & (maf < hi))[0], exclude)
        if len(eligible) >= n_select:
            break
        if lo <= 0.0 and hi >= 0.5:
            raise errors.InsufficientLoci(
                'Only %d loci eligible for the %s set even after widening to the full MAF range' % (
                    len(eligible), kind)
            )
        k += 1
    if k:
        LOG.warning('Widened the %s MAF window to (%.3f, %.3f) to find %d loci', kind, lo, hi, n_select)
    chosen = np.sort(rng.choice(eligible, size=n_select, replace=False))
    return chosen, (lo, hi)


def select_snp_sets(maf, seed=defaults.SEED,
                    n_select=defaults.N_SELECTED_SNPS,
                    causal_window=defaults.CAUSAL_MAF_WINDOW,
                    spurious_window=defaults.SPURIOUS_MAF_WINDOW,
                    widen_step=defaults.WINDOW_WIDEN_STEP):
    """Causal and spurious SNP sets from MAF windows; the causal set is filled first."""
    maf = np.asarray(maf, dtype=float)
    rng = rfdm_rng.generator(seed, rfdm_rng.SNP_SETS)
    causal, cw = _pick_window(maf, causal_window, [], n_select, widen_step, rng, 'causal')
    spurious, sw = _pick_window(maf, spurious_window, causal, n_select, widen_step, rng, 'spurious')
    return SnpSets(causal, spurious, cw, sw)
