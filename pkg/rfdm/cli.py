import argparse
import json
import logging
import os
import sys

import numpy as np

from rfdm import errors
from rfdm import evaluate
from rfdm import forest as forest_pkg
from rfdm import importance
from rfdm import manifold
from rfdm import metric
from rfdm import simgen
from rfdm.evaluate import experiment
from rfdm.evaluate import plot
from rfdm.evaluate import roc as rfdm_roc
from rfdm.forest import forest as rfdm_forest
from rfdm.forest import proximity as rfdm_proximity
from rfdm.forest import serialize
from rfdm.importance import gini
from rfdm.manifold import eigenmap
from rfdm.manifold import supervised
from rfdm.manifold import trte
from rfdm.metric import distances
from rfdm.simgen import disease
from rfdm.simgen import study as rfdm_study
from rfdm.tools import dataset
from rfdm.tools import utils

LOG = logging.getLogger(__name__)

PENETRANCE_GRID = np.linspace(-3.0, 3.0, 121)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, '%s: error: %s\n' % (self.prog, message))


def _check_ids(expected, got, what):
    if list(expected) != list(got):
        raise errors.DataError('Subject ids of %s do not match' % what)


def distance(args):
    if args.metric == distances.EUCLIDEAN:
        _, vectors = dataset.load_vectors(args.input)
        responses = dataset.ResponseSet(vectors=vectors)
    elif args.metric == distances.DISCRETE:
        _, labels = dataset.load_labels(args.input)
        responses = dataset.ResponseSet(labels=labels)
    elif args.metric == distances.SPD:
        _, matrices = dataset.load_matrix_bundle(args.input)
        responses = dataset.ResponseSet(spd_matrices=matrices)
    else:
        _, graphs = dataset.load_graph_bundle(args.input)
        responses = dataset.ResponseSet(graphs=graphs)
    d = distances.MetricSpec(args.metric)(responses)
    dataset.save_distances(d, args.out)
    utils.print_fun('Wrote %dx%d %s distances to %s' % (d.n, d.n, args.metric, args.out))


def combine(args):
    matrices = [dataset.load_distances(p) for p in args.input]
    d = distances.fuse_distances(matrices, utils.float_list(args.weights))
    dataset.save_distances(d, args.out)
    utils.print_fun('Fused %d distance matrices into %s' % (len(matrices), args.out))


def train(args):
    genotypes = dataset.load_genotypes(args.genotypes)
    labels = None
    if args.labels:
        ids, labels = dataset.load_labels(args.labels)
        _check_ids(genotypes.subject_ids, ids, args.labels)
    ds = dataset.Dataset(genotypes, dataset.load_distances(args.distances), labels=labels)
    params = forest_pkg.forest_params_args(args)
    f = rfdm_forest.grow_forest(ds, params)
    serialize.save_forest(f, args.out)
    utils.print_fun('Saved %d trees to %s' % (len(f.trees), args.out))


def proximity(args):
    f = serialize.load_forest(args.forest)
    ds = dataset.Dataset(dataset.load_genotypes(args.genotypes)) if args.genotypes else None
    w = rfdm_proximity.proximity(f, ds)
    dataset.save_matrix(w.values, args.out)
    utils.print_fun('Wrote proximity of %d subjects to %s' % (w.n, args.out))


def rank_snps(args):
    report = gini.gini_importance(serialize.load_forest(args.forest))
    gini.save_ranking(report, args.out)
    utils.print_fun('Ranked %d SNPs into %s' % (report.n_features, args.out))


def rank_pairs(args):
    report = gini.pairwise_interaction(serialize.load_forest(args.forest), variant=args.variant)
    gini.save_ranking(report, args.out)
    p = report.n_features
    utils.print_fun('Ranked %d SNP pairs into %s' % (p * (p - 1) // 2, args.out))


def embed(args):
    w = dataset.load_matrix(args.similarity)
    e = eigenmap.laplacian_eigenmap(w, m=args.dims, laplacian=args.laplacian, n_neighbors=args.neighbors)
    eigenmap.save_embedding(e, args.out)
    utils.print_fun('Eigenvalues: %s' % ', '.join('%.6g' % v for v in e.eigenvalues))


def trte_embed(args):
    ids, vectors = dataset.load_vectors(args.vectors)
    e = trte.trte_embed(vectors, n_trees=args.trees, max_depth=args.max_depth, m=args.dims, seed=args.seed)
    eigenmap.save_embedding(e, args.out, subject_ids=ids)
    utils.print_fun('Embedded %d subjects into %s' % (len(ids), args.out))
    if args.distances_out:
        d = trte.trte_distance(vectors, n_trees=args.trees, max_depth=args.max_depth, m=args.dims, seed=args.seed)
        dataset.save_distances(d, args.distances_out)
        utils.print_fun('Wrote %dx%d embedding distances to %s' % (d.n, d.n, args.distances_out))


def supervised_distance(args):
    label_ids, labels = dataset.load_labels(args.labels)
    ids, vectors = dataset.load_vectors(args.vectors)
    _check_ids(label_ids, ids, args.vectors)
    d = supervised.supervised_distance(labels, vectors, forest_pkg.forest_params_args(args), m=args.dims)
    dataset.save_distances(d, args.out)
    utils.print_fun('Wrote supervised manifold distances to %s' % args.out)


def simulate(args):
    config = rfdm_study.SimulationConfig.load(args.config) if args.config else rfdm_study.SimulationConfig()
    if args.seed is not None:
        d = config.to_dict()
        d['seed'] = args.seed
        d['population']['seed'] = args.seed
        config = rfdm_study.SimulationConfig.from_dict(d)
    population = rfdm_study.simulate_population(config)
    sample = rfdm_study.sample_study(
        population, n=config.study['n_subjects'], balanced=config.study['balanced'], seed=config.seed,
    )
    rfdm_study.write_study(population, sample, args.out_dir)
    utils.print_fun('Simulated %d subjects (zeta=%.4f) into %s' % (len(sample.indices), population.zeta, args.out_dir))


def run_experiment(args):
    if args.spec:
        spec = experiment.ExperimentSpec.load(args.spec)
    else:
        spec = experiment.ExperimentSpec(experiment=args.experiment)
    report = experiment.run_experiment(spec, out_dir=args.out_dir)
    for name, variant in sorted(report.summary['variants'].items()):
        for arm, a in variant['arms'].items():
            utils.print_fun('%s %s %s: mean AUC %.4f' % (spec.experiment, name, arm, a['mean_auc']))


def _truth_items(truth, ranked):
    pairs = bool(ranked) and isinstance(ranked[0][0], tuple)
    if pairs:
        return [tuple(p) for p in truth['causal_pairs']]
    return truth['causal_snps']


def roc(args):
    ranked = gini.load_ranking(args.ranking)
    with open(args.truth) as f:
        try:
            truth = json.load(f)
        except ValueError as e:
            raise errors.DataError('Cannot parse %s: %s' % (args.truth, e))
    curve = rfdm_roc.roc(ranked, _truth_items(truth, ranked))
    rfdm_roc.save_roc(curve, args.out)
    utils.print_fun('AUC: %.4f' % curve.auc)


def plot_curves(args):
    curves = [rfdm_roc.load_roc(p) for p in args.input]
    if args.labels:
        labels = [s.strip() for s in args.labels.split(',')]
    else:
        labels = [os.path.splitext(os.path.basename(p))[0] for p in args.input]
    plot.emit_plot(curves, labels, args.out, title=args.title)
    utils.print_fun('Wrote %s' % args.out)


def penetrance_plot(args):
    curves = disease.penetrance_curve(PENETRANCE_GRID, args.penetrances)
    plot.emit_penetrance_plot(PENETRANCE_GRID, curves, args.penetrances, args.out)
    utils.print_fun('Wrote %s' % args.out)


COMMANDS = [
    ('distance', 'Response distance matrix.', metric.add_distance_args, distance),
    ('combine', 'Convex combination of distance matrices.', metric.add_combine_args, combine),
    ('train', 'Grow a forest on genotypes and response distances.', forest_pkg.add_train_args, train),
    ('proximity', 'Out-of-bag proximity matrix of a forest.', forest_pkg.add_proximity_args, proximity),
    ('rank-snps', 'Rank SNPs by Gini importance.', importance.add_rank_args, rank_snps),
    ('rank-pairs', 'Rank SNP pairs by interaction.',
     lambda p: importance.add_rank_args(p, pairs=True), rank_pairs),
    ('embed', 'Laplacian eigenmap of a similarity matrix.', manifold.add_embed_args, embed),
    ('trte', 'Totally random trees embedding of phenotype vectors.', manifold.add_trte_args, trte_embed),
    ('supervised-distance', 'Distances on the label-supervised phenotype manifold.',
     lambda p: (manifold.add_supervised_args(p), forest_pkg.add_forest_args(p)), supervised_distance),
    ('simulate', 'Simulate a population and sample a study.', simgen.add_simulate_args, simulate),
    ('experiment', 'Run an evaluation experiment.', evaluate.add_experiment_args, run_experiment),
    ('roc', 'ROC curve of a ranking against simulated truth.', evaluate.add_roc_args, roc),
    ('plot', 'Plot ROC curves to SVG.', evaluate.add_plot_args, plot_curves),
    ('penetrance-plot', 'Plot disease posterior curves to SVG.', simgen.add_penetrance_plot_args, penetrance_plot),
]


def build_parser():
    parser = _Parser(prog='rfdm', description='Random forests on response distance matrices.')
    utils.add_log_args(parser)
    subparsers = parser.add_subparsers(dest='command')
    for name, help_text, add_args, func in COMMANDS:
        sub = subparsers.add_parser(name, help=help_text, description=help_text)
        add_args(sub)
        sub.set_defaults(func=func)
    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return e.code
    if not getattr(args, 'func', None):
        parser.print_usage(sys.stderr)
        return 1

    utils.configure_logging(args.log_level)
    try:
        args.func(args)
    except errors.RFDMError as e:
        LOG.error('%s: %s', type(e).__name__, e)
        return e.exit_code
    except (IOError, OSError) as e:
        LOG.error('%s', e)
        return errors.DataError.exit_code
    return 0


if __name__ == '__main__':
    sys.exit(main())
