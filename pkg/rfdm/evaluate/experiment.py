import copy
import json
import logging
import os

import joblib
import numpy as np

from rfdm import defaults
from rfdm import errors
from rfdm import mlboard
from rfdm.evaluate import plot
from rfdm.evaluate import roc as rfdm_roc
from rfdm.forest import forest as rfdm_forest
from rfdm.forest import proximity as rfdm_proximity
from rfdm.forest import tree as rfdm_tree
from rfdm.importance import gini
from rfdm.manifold import eigenmap
from rfdm.manifold import supervised
from rfdm.metric import distances
from rfdm.simgen import study as rfdm_study
from rfdm.tools import rng as rfdm_rng
from rfdm.tools import utils

LOG = logging.getLogger(__name__)

QUANTITATIVE = 'quantitative'
CASE_CONTROL = 'case_control'
SPD = 'spd'
GRAPH = 'graph'
SUPERVISED = 'supervised'
FUSED = 'fused'
ARMS = [QUANTITATIVE, CASE_CONTROL, SPD, GRAPH, SUPERVISED, FUSED]

SNPS = 'snps'
PAIRS = 'pairs'

EXPERIMENTS = {
    # causal single SNPs, quantitative vs case-control responses
    'E1': {'target': SNPS, 'model': 'P0', 'arms': [QUANTITATIVE, CASE_CONTROL]},
    'E2': {'target': PAIRS, 'model': 'P1', 'arms': [QUANTITATIVE, CASE_CONTROL]},
    'E3': {'target': PAIRS, 'model': 'P3', 'arms': [SPD, CASE_CONTROL]},
    'E4': {'target': PAIRS, 'model': 'P3', 'arms': [GRAPH, CASE_CONTROL]},
    'E5': {'target': PAIRS, 'model': 'P3', 'arms': [SUPERVISED, SPD, FUSED], 'delta': defaults.E5_DELTA},
    'E6': {'target': PAIRS, 'model': 'P3', 'arms': [QUANTITATIVE, CASE_CONTROL, SUPERVISED],
           'spurious_scale': [defaults.SPURIOUS_SCALE]},
}


class ExperimentSpec(object):
    def __init__(self,
                 experiment='E1',
                 model=None,
                 target=None,
                 arms=None,
                 penetrance=defaults.PENETRANCE,
                 delta=None,
                 gamma=defaults.GAMMA,
                 spurious_scale=None,
                 iterations=defaults.ITERATIONS,
                 seed=defaults.SEED,
                 forest=None,
                 simulation=None,
                 pair_variant=defaults.PAIR_VARIANT,
                 dims=defaults.DIMS,
                 fusion_weights=defaults.FUSION_WEIGHTS,
                 n_jobs=defaults.N_JOBS):
        if experiment not in EXPERIMENTS:
            raise errors.DataError('Unknown experiment %r, choose from %s' % (experiment, sorted(EXPERIMENTS)))
        recipe = EXPERIMENTS[experiment]
        self.experiment = experiment
        self.model = model or recipe['model']
        self.target = target or recipe['target']
        self.arms = list(arms or recipe['arms'])
        self.penetrance = float(penetrance)
        self.delta = float(recipe.get('delta', defaults.DELTA) if delta is None else delta)
        self.gamma = float(gamma)
        if spurious_scale is None:
            spurious_scale = recipe.get('spurious_scale', [])
        self.spurious_scale = [float(s) for s in spurious_scale]
        self.iterations = int(iterations)
        self.seed = int(seed)
        self.forest = dict(forest or {})
        self.simulation = copy.deepcopy(simulation or {})
        self.pair_variant = pair_variant
        self.dims = int(dims)
        self.fusion_weights = [float(w) for w in fusion_weights]
        self.n_jobs = int(n_jobs)

        if self.target not in (SNPS, PAIRS):
            raise errors.DataError('Unknown ranking target %r' % self.target)
        unknown = [a for a in self.arms if a not in ARMS]
        if unknown or not self.arms:
            raise errors.DataError('Unknown or missing arms %s, choose from %s' % (unknown, ARMS))
        if self.pair_variant not in gini.PAIR_VARIANTS:
            raise errors.DataError('Unknown pair variant %r' % self.pair_variant)
        if self.iterations < 1:
            raise errors.DataError('iterations must be positive')
        if not 0.0 < self.penetrance < 1.0:
            raise errors.DataError('penetrance must lie in (0, 1), got %r' % self.penetrance)
        utils.check_weights(self.fusion_weights, 2)
        # both fail early on unknown keys
        self.forest_params(self.seed)
        self.simulation_config(self.seed)

    def to_dict(self):
        return {
            'experiment': self.experiment,
            'model': self.model,
            'target': self.target,
            'arms': list(self.arms),
            'penetrance': self.penetrance,
            'delta': self.delta,
            'gamma': self.gamma,
            'spurious_scale': list(self.spurious_scale),
            'iterations': self.iterations,
            'seed': self.seed,
            'forest': dict(self.forest),
            'simulation': copy.deepcopy(self.simulation),
            'pair_variant': self.pair_variant,
            'dims': self.dims,
            'fusion_weights': list(self.fusion_weights),
            'n_jobs': self.n_jobs,
        }

    @classmethod
    def from_dict(cls, d):
        unknown = set(d) - set(cls().to_dict())
        if unknown:
            raise errors.DataError('Unknown experiment key(s): %s' % ', '.join(sorted(unknown)))
        return cls(**d)

    @classmethod
    def load(cls, path):
        with open(path) as f:
            try:
                d = json.load(f)
            except ValueError as e:
                raise errors.DataError('Cannot parse %s: %s' % (path, e))
        return cls.from_dict(d)

    def iteration_seed(self, iteration):
        return rfdm_rng.derive_seed(self.seed, rfdm_rng.ITERATION, iteration)

    def forest_params(self, seed):
        d = dict(self.forest)
        d['seed'] = seed
        return rfdm_tree.ForestParams.from_dict(d)

    def simulation_config(self, seed, spurious_scale=None):
        d = copy.deepcopy(self.simulation)
        d['seed'] = seed
        d['population'] = dict(d.get('population', {}), seed=seed)
        d['genetic'] = dict(
            d.get('genetic', {}),
            model=self.model,
            delta=self.delta,
            gamma=self.gamma,
            spurious_delta=(spurious_scale or 0.0) * self.delta,
        )
        d['disease'] = dict(d.get('disease', {}), penetrance=self.penetrance)
        return rfdm_study.SimulationConfig.from_dict(d)


class ArmResult(object):
    def __init__(self, report, curve, embedding=None):
        self.report = report
        self.curve = curve
        self.embedding = embedding

    @property
    def auc(self):
        return self.curve.auc


class IterationResult(object):
    def __init__(self, iteration, seed, spurious_scale, truth, subject_ids, labels, arms):
        self.iteration = iteration
        self.seed = seed
        self.spurious_scale = spurious_scale
        self.truth = truth
        self.subject_ids = subject_ids
        self.labels = labels
        self.arms = arms

    def aucs(self):
        return {arm: r.auc for arm, r in self.arms.items()}


class _ArmPipeline(object):
    """Distances, forests and importance reports of one study, shared across arms."""

    def __init__(self, spec, population, sample, params):
        self.spec = spec
        self.population = population
        self.sample = sample
        self.params = params
        self._covariances = None
        self._forests = {}
        self._supervised = None

    @property
    def covariances(self):
        if self._covariances is None:
            self._covariances = rfdm_study.study_covariances(self.population, self.sample)
        return self._covariances

    def supervised_proximity(self):
        if self._supervised is None:
            self._supervised = supervised.supervised_proximity(
                self.sample.labels, self.sample.responses.vectors, self.params,
            )
        return self._supervised

    def distances(self, arm):
        if arm == QUANTITATIVE:
            return distances.euclidean_distances(self.sample.responses.vectors), None
        if arm == CASE_CONTROL:
            return distances.discrete_distances(self.sample.labels), None
        if arm == SPD:
            return distances.spd_distances(self.covariances), None
        if arm == GRAPH:
            return distances.graph_distances(rfdm_study.study_graphs(self.population, self.covariances)), None
        if arm == SUPERVISED:
            w = self.supervised_proximity()
        else:
            w = eigenmap.fuse_proximities(
                [self.supervised_proximity(), self.proximity(SPD)], self.spec.fusion_weights,
            )
        e = eigenmap.laplacian_eigenmap(w, m=self.spec.dims)
        return eigenmap.embedding_distances(e), e

    def forest(self, arm):
        if arm not in self._forests:
            d, e = self.distances(arm)
            task = defaults.TASK_CLASSIFICATION if arm == CASE_CONTROL else defaults.TASK_REGRESSION
            ds = self.sample.with_distances(d)
            self._forests[arm] = (rfdm_forest.grow_forest(ds, self.params.replace(task=task)), ds, e)
        return self._forests[arm]

    def proximity(self, arm):
        f, ds, _ = self.forest(arm)
        return rfdm_proximity.proximity(f, ds)

    def report(self, arm):
        f, _, e = self.forest(arm)
        if self.spec.target == SNPS:
            return gini.gini_importance(f), e
        return gini.pairwise_interaction(f, variant=self.spec.pair_variant), e


def _truth_items(model, target):
    if target == SNPS:
        return set(model.causal_snps)
    return set(model.causal_pairs)


def run_iteration(spec, iteration, spurious_scale=None):
    """One seeded iteration; replayable from its ExperimentSpec alone."""
    seed = spec.iteration_seed(iteration)
    config = spec.simulation_config(seed, spurious_scale)
    LOG.info('%s iteration %d (seed %d) started', spec.experiment, iteration, seed)
    population = rfdm_study.simulate_population(config)
    sample = rfdm_study.sample_study(
        population, n=config.study['n_subjects'], balanced=config.study['balanced'], seed=seed,
    )
    pipeline = _ArmPipeline(spec, population, sample, spec.forest_params(seed))
    truth = _truth_items(population.model, spec.target)

    arms = {}
    for arm in spec.arms:
        report, embedding = pipeline.report(arm)
        curve = rfdm_roc.roc(gini.rank(report), truth)
        arms[arm] = ArmResult(report, curve, embedding)
        LOG.info('%s iteration %d arm %s: AUC %.4f', spec.experiment, iteration, arm, curve.auc)
    return IterationResult(
        iteration, seed, spurious_scale, population.truth(),
        sample.subject_ids, sample.labels, arms,
    )


def write_iteration(result, dirname):
    if not os.path.isdir(dirname):
        os.makedirs(dirname)
    with open(os.path.join(dirname, 'truth.json'), 'w') as f:
        json.dump(result.truth, f, indent=2)
    for arm, r in result.arms.items():
        gini.save_ranking(r.report, os.path.join(dirname, 'ranking-%s.tsv' % arm))
        rfdm_roc.save_roc(r.curve, os.path.join(dirname, 'roc-%s.csv' % arm))
        if r.embedding is not None:
            eigenmap.save_embedding(r.embedding, os.path.join(dirname, 'coords-%s.csv' % arm),
                                    subject_ids=result.subject_ids)
            if r.embedding.m >= 2:
                plot.emit_manifold_plot(
                    r.embedding.coordinates, result.labels, os.path.join(dirname, 'manifold-%s.svg' % arm),
                    title='%s iteration %d' % (arm, result.iteration),
                )


def _variants(spec):
    if not spec.spurious_scale:
        return [(None, None)]
    return [('spurious-%gx' % s, s) for s in spec.spurious_scale]


class ExperimentReport(object):
    def __init__(self, spec, summary, results, mean_curves):
        self.spec = spec
        self.summary = summary
        self.results = results
        self.mean_curves = mean_curves

    def aucs(self, arm, variant=None):
        return [r.arms[arm].auc for r in self.results[variant]]

    def mean_auc(self, arm, variant=None):
        return float(np.mean(self.aucs(arm, variant)))


def run_experiment(spec, out_dir=None):
    variants = _variants(spec)
    seeds = [spec.iteration_seed(i) for i in range(spec.iterations)]
    if out_dir:
        if not os.path.isdir(out_dir):
            os.makedirs(out_dir)
        manifest = {
            'spec': spec.to_dict(),
            'iteration_seeds': seeds,
            'variants': [{'name': name, 'spurious_scale': scale} for name, scale in variants],
        }
        with open(os.path.join(out_dir, 'manifest.json'), 'w') as f:
            json.dump(manifest, f, indent=2)

    summary = {'experiment': spec.experiment, 'target': spec.target, 'variants': {}}
    results = {}
    mean_curves = {}
    for name, scale in variants:
        LOG.info('Running %s%s: %d iterations, arms %s', spec.experiment,
                 ' (%s)' % name if name else '', spec.iterations, ', '.join(spec.arms))
        iteration_results = joblib.Parallel(n_jobs=spec.n_jobs)(
            joblib.delayed(run_iteration)(spec, i, scale) for i in range(spec.iterations)
        )
        results[name] = list(iteration_results)
        variant_dir = os.path.join(out_dir, name) if out_dir and name else out_dir

        arms = {}
        curves = {}
        for arm in spec.arms:
            arm_curves = [r.arms[arm].curve for r in iteration_results]
            curves[arm] = rfdm_roc.mean_roc(arm_curves)
            aucs = [c.auc for c in arm_curves]
            arms[arm] = {
                'aucs': aucs,
                'mean_auc': float(np.mean(aucs)),
                'mean_roc_auc': curves[arm].auc,
            }
        mean_curves[name] = curves
        summary['variants'][name or 'default'] = {
            'spurious_scale': scale,
            'arms': arms,
            'zeta': [r.truth['zeta'] for r in iteration_results],
        }

        if variant_dir:
            for r in iteration_results:
                write_iteration(r, os.path.join(variant_dir, 'iter-%02d' % r.iteration))
            for arm, curve in curves.items():
                rfdm_roc.save_roc(curve, os.path.join(variant_dir, 'mean-roc-%s.csv' % arm))
            plot.emit_plot(
                [curves[a] for a in spec.arms], spec.arms, os.path.join(variant_dir, 'mean-roc.svg'),
                title=('%s %s' % (spec.experiment, name or '')).strip(),
            )

    if out_dir:
        with open(os.path.join(out_dir, 'report.json'), 'w') as f:
            json.dump(summary, f, indent=2)

    tracked = {}
    for name, v in summary['variants'].items():
        for arm, a in v['arms'].items():
            tracked['%s.%s.mean_auc' % (name, arm)] = a['mean_auc']
    mlboard.update_task_info(tracked)
    return ExperimentReport(spec, summary, results, mean_curves)
