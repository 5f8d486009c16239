import json
import logging
import os

import numpy as np

from rfdm import defaults
from rfdm import errors
from rfdm.simgen import disease
from rfdm.simgen import glasso
from rfdm.simgen import models
from rfdm.simgen import phenotype
from rfdm.simgen import population as rfdm_population
from rfdm.tools import dataset
from rfdm.tools import rng as rfdm_rng

LOG = logging.getLogger(__name__)

GENETIC_DEFAULTS = {
    'model': 'P3',
    'delta': defaults.DELTA,
    'gamma': defaults.GAMMA,
    'spurious_delta': 0.0,
}
DISEASE_DEFAULTS = {
    'mu_cn': defaults.MU_CN,
    'mu_ad': defaults.MU_AD,
    'sigma': defaults.SIGMA,
    'penetrance': defaults.PENETRANCE,
    'n_roi': defaults.N_ROI,
    'n_disease_roi': defaults.N_DISEASE_ROI,
    'n_spurious_roi': defaults.N_SPURIOUS_ROI,
}
PHENOTYPE_DEFAULTS = {
    'n_cov_roi': defaults.N_COV_ROI,
    'covariance_noise': defaults.COVARIANCE_NOISE,
    'sice_rho': defaults.SICE_RHO,
    'sice_tol': defaults.SICE_TOL,
    'sice_max_iter': defaults.SICE_MAX_ITER,
}
STUDY_DEFAULTS = {
    'n_subjects': defaults.STUDY_SIZE,
    'balanced': True,
}


def _section(name, given, section_defaults):
    given = dict(given or {})
    unknown = set(given) - set(section_defaults)
    if unknown:
        raise errors.DataError('Unknown %s key(s): %s' % (name, ', '.join(sorted(unknown))))
    merged = dict(section_defaults)
    merged.update(given)
    return merged


class SimulationConfig(object):
    SECTIONS = ('seed', 'population', 'genetic', 'disease', 'phenotype', 'study')

    def __init__(self, seed=defaults.SEED, population=None, genetic=None, disease=None,
                 phenotype=None, study=None):
        self.seed = int(seed)
        if isinstance(population, rfdm_population.PopulationConfig):
            population = population.to_dict()
        population = dict(population or {})
        population.setdefault('seed', self.seed)
        self.population = rfdm_population.PopulationConfig.from_dict(population)
        self.genetic = _section('genetic', genetic, GENETIC_DEFAULTS)
        if self.genetic['model'] not in models.MODELS:
            raise errors.DataError('Unknown genetic model %r' % self.genetic['model'])
        self.disease = _section('disease', disease, DISEASE_DEFAULTS)
        self.phenotype = _section('phenotype', phenotype, PHENOTYPE_DEFAULTS)
        self.study = _section('study', study, STUDY_DEFAULTS)
        if self.phenotype['n_cov_roi'] > self.disease['n_roi']:
            raise errors.DataError('n_cov_roi exceeds n_roi')

    def to_dict(self):
        return {
            'seed': self.seed,
            'population': self.population.to_dict(),
            'genetic': dict(self.genetic),
            'disease': dict(self.disease),
            'phenotype': dict(self.phenotype),
            'study': dict(self.study),
        }

    @classmethod
    def from_dict(cls, d):
        unknown = set(d) - set(cls.SECTIONS)
        if unknown:
            raise errors.DataError('Unknown simulation key(s): %s' % ', '.join(sorted(unknown)))
        return cls(**d)

    @classmethod
    def load(cls, path):
        with open(path) as f:
            try:
                return cls.from_dict(json.load(f))
            except ValueError as e:
                if isinstance(e, errors.DataError):
                    raise
                raise errors.DataError('Cannot parse %s: %s' % (path, e))

    def replace(self, **sections):
        d = self.to_dict()
        for key, value in sections.items():
            if isinstance(d.get(key), dict):
                d[key].update(value)
            else:
                d[key] = value
        return SimulationConfig.from_dict(d)


class Population(object):
    def __init__(self, config, genotypes, maf, snp_sets, model, disease_model, base_vectors,
                 vectors, zeta, posterior, labels):
        self.config = config
        self.genotypes = genotypes
        self.maf = maf
        self.snp_sets = snp_sets
        self.model = model
        self.disease_model = disease_model
        self.base_vectors = base_vectors
        self.vectors = vectors
        self.zeta = zeta
        self.posterior = posterior
        self.labels = labels
        self._cov_reference = None

    @property
    def n_subjects(self):
        return self.genotypes.n_subjects

    @property
    def cov_reference(self):
        """Reference covariance of the first ``n_cov_roi`` parcels, from unaffected base vectors."""
        if self._cov_reference is None:
            q = self.config.phenotype['n_cov_roi']
            pilot = self.base_vectors[:defaults.N_REFERENCE_SUBJECTS, :q]
            self._cov_reference = phenotype.shrink_covariance(pilot)
        return self._cov_reference

    def truth(self):
        ids = self.genotypes.snp_ids
        return {
            'model': self.model.model,
            'causal_snps': [ids[i] for i in self.model.causal_snps],
            'causal_pairs': [[ids[a], ids[b]] for a, b in self.model.causal_pairs],
            'spurious_snps': [ids[i] for i in sorted(set(np.ravel(self.model.spurious_pairs).tolist()))],
            'spurious_pairs': [[ids[a], ids[b]] for a, b in sorted(tuple(sorted(p)) for p in self.model.spurious_pairs)],
            'disease_roi': self.disease_model.disease_roi.tolist(),
            'spurious_roi': self.disease_model.spurious_roi.tolist(),
            'zeta': self.zeta,
            'seed': self.config.seed,
            'genetic_model': self.model.to_dict(),
            'snp_sets': self.snp_sets.to_dict(),
        }


def simulate_population(config):
    """Genotypes, genetic model, vector phenotypes and calibrated disease labels of one population."""
    seed = config.seed
    genotypes, maf = rfdm_population.simulate_genotypes(config.population)
    snp_sets = rfdm_population.select_snp_sets(maf, seed=seed)
    g = config.genetic
    model = models.build_genetic_model(
        g['model'], snp_sets.causal, snp_sets.spurious, seed=seed,
        delta=g['delta'], gamma=g['gamma'], spurious_delta=g['spurious_delta'],
    )
    d = config.disease
    disease_model = disease.draw_disease_model(
        n_roi=d['n_roi'], n_disease_roi=d['n_disease_roi'], n_spurious_roi=d['n_spurious_roi'],
        seed=seed, mu_cn=d['mu_cn'], mu_ad=d['mu_ad'], sigma=d['sigma'], penetrance=d['penetrance'],
    )
    base = phenotype.simulate_base_vectors(genotypes.n_subjects, n_roi=d['n_roi'], seed=seed)
    y = models.apply_vector_effect(base, genotypes, model, disease_model.disease_roi)
    if model.spurious_delta:
        y = models.apply_vector_effect(y, genotypes, model, disease_model.spurious_roi, spurious=True)

    zeta = disease.calibrate_zeta(d['penetrance'], disease_model, y)
    model.zeta = zeta
    y[:, disease_model.disease_roi] -= zeta
    labels, post = disease.classify_disease(y, disease_model, seed=seed)
    return Population(config, genotypes, maf, snp_sets, model, disease_model, base, y, zeta, post, labels)


class Study(dataset.Dataset):
    """A sampled study; ``indices`` point into the source population."""

    def __init__(self, genotypes, indices, distances=None, responses=None, labels=None):
        super(Study, self).__init__(genotypes, distances, responses=responses, labels=labels)
        self.indices = np.asarray(indices, dtype=np.int64)

    def with_distances(self, distances):
        return Study(self.genotypes, self.indices, distances, responses=self.responses, labels=self.labels)


def sample_study(population, labels=None, n=defaults.STUDY_SIZE, balanced=True, seed=defaults.SEED):
    labels = population.labels if labels is None else np.asarray(labels)
    rng = rfdm_rng.generator(seed, rfdm_rng.STUDY)
    if balanced:
        half = n // 2
        cases = np.nonzero(labels == 1)[0]
        controls = np.nonzero(labels == 0)[0]
        if len(cases) < half or len(controls) < n - half:
            raise errors.InsufficientSubjects(
                'Need %d cases and %d controls, population has %d and %d' % (
                    half, n - half, len(cases), len(controls))
            )
        indices = np.concatenate([
            rng.choice(cases, size=half, replace=False),
            rng.choice(controls, size=n - half, replace=False),
        ])
    else:
        if n > len(labels):
            raise errors.InsufficientSubjects('Need %d subjects, population has %d' % (n, len(labels)))
        indices = rng.choice(len(labels), size=n, replace=False)
    indices = np.sort(indices)
    return Study(
        population.genotypes.subset(indices),
        indices,
        responses=dataset.ResponseSet(vectors=population.vectors[indices]),
        labels=labels[indices],
    )


def study_covariances(population, study):
    """Attenuated covariance phenotypes of the study subjects."""
    p = population.config.phenotype
    sigmas = phenotype.simulate_base_covariances(
        len(study.indices), population.cov_reference, seed=population.config.seed,
        noise_scale=p['covariance_noise'], subject_index=study.indices,
    )
    return models.apply_covariance_effect(sigmas, study.genotypes, population.model)


def study_graphs(population, covariances):
    p = population.config.phenotype
    graphs = [
        glasso.sice_graph(s, rho=p['sice_rho'], tol=p['sice_tol'], max_iter=p['sice_max_iter'])
        for s in covariances
    ]
    LOG.info('Estimated %d connectivity graphs (mean %.1f edges)',
             len(graphs), np.mean([g.edge_count for g in graphs]))
    return graphs


def write_study(population, study, out_dir, covariances=None, graphs=None):
    if not os.path.isdir(out_dir):
        os.makedirs(out_dir)
    ids = study.subject_ids
    dataset.save_genotypes(study.genotypes, os.path.join(out_dir, 'genotypes.csv'))
    dataset.save_vectors(study.responses.vectors, os.path.join(out_dir, 'vectors.csv'), subject_ids=ids)
    dataset.save_labels(study.labels, os.path.join(out_dir, 'labels.csv'), subject_ids=ids)
    if covariances is None:
        covariances = study_covariances(population, study)
    dataset.save_matrix_bundle(covariances, os.path.join(out_dir, 'covariances'), subject_ids=ids)
    if graphs is None:
        graphs = study_graphs(population, covariances)
    dataset.save_graph_bundle(graphs, os.path.join(out_dir, 'graphs'), subject_ids=ids)

    truth = population.truth()
    truth['config'] = population.config.to_dict()
    truth['subjects'] = study.indices.tolist()
    with open(os.path.join(out_dir, 'truth.json'), 'w') as f:
        json.dump(truth, f, indent=2)
    LOG.info('Wrote study of %d subjects to %s', len(ids), out_dir)
