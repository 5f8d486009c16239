from rfdm import defaults
from rfdm.forest import tree


def _mtry(value):
    return value if value == 'auto' else int(value)


def add_forest_args(parser):
    parser.add_argument(
        '--trees',
        type=int,
        help='Number of trees in the forest.',
        default=defaults.N_TREES,
    )
    parser.add_argument(
        '--mtry',
        type=_mtry,
        help='Candidate features per node, or "auto" (sqrt(p) for classification, p/3 for regression).',
        default=defaults.MTRY,
    )
    parser.add_argument(
        '--max_depth', '--max-depth',
        dest='max_depth',
        type=int,
        help='Maximum tree depth.',
        default=defaults.MAX_DEPTH,
    )
    parser.add_argument(
        '--min_node_size', '--min-node-size',
        dest='min_node_size',
        type=int,
        help='Nodes smaller than twice this size are not split.',
        default=defaults.MIN_NODE_SIZE,
    )
    parser.add_argument(
        '--seed',
        type=int,
        help='Master random seed.',
        default=defaults.SEED,
    )
    parser.add_argument(
        '--gain',
        help='Split gain variant.',
        default=defaults.GAIN_VARIANT,
        choices=defaults.GAIN_VARIANTS,
    )
    parser.add_argument(
        '--task',
        help='Selects the default mtry rule.',
        default=defaults.TASK_REGRESSION,
        choices=[defaults.TASK_REGRESSION, defaults.TASK_CLASSIFICATION],
    )
    parser.add_argument(
        '--jobs',
        type=int,
        help='Parallel tree growing jobs.',
        default=defaults.N_JOBS,
    )


def forest_params_args(args):
    return tree.ForestParams(
        n_trees=args.trees,
        mtry=args.mtry,
        max_depth=args.max_depth,
        min_node_size=args.min_node_size,
        seed=args.seed,
        gain_variant=args.gain,
        task=args.task,
        n_jobs=args.jobs,
    )


def add_train_args(parser):
    parser.add_argument(
        '--genotypes',
        required=True,
        help='Genotype CSV.',
    )
    parser.add_argument(
        '--distances',
        required=True,
        help='Response distance CSV.',
    )
    parser.add_argument(
        '--labels',
        help='Labels CSV, required by the shannon gain.',
    )
    parser.add_argument(
        '--out',
        required=True,
        help='Output forest file.',
    )
    add_forest_args(parser)


def add_proximity_args(parser):
    parser.add_argument(
        '--forest',
        required=True,
        help='Forest file.',
    )
    parser.add_argument(
        '--genotypes',
        help='Genotype CSV to route instead of the training genotypes stored in the forest.',
    )
    parser.add_argument(
        '--out',
        required=True,
        help='Output proximity CSV.',
    )
