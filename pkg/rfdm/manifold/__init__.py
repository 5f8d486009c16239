from rfdm import defaults
from rfdm.manifold import eigenmap


def add_embed_args(parser):
    parser.add_argument(
        '--similarity',
        required=True,
        help='Similarity or proximity CSV.',
    )
    parser.add_argument(
        '--dims',
        type=int,
        help='Embedding dimensions.',
        default=defaults.DIMS,
    )
    parser.add_argument(
        '--laplacian',
        help='Laplacian normalization.',
        default=defaults.LAPLACIAN,
        choices=eigenmap.LAPLACIANS,
    )
    parser.add_argument(
        '--neighbors',
        type=int,
        help='Keep only this many strongest links per subject.',
        default=None,
    )
    parser.add_argument(
        '--out',
        required=True,
        help='Output coordinates CSV.',
    )


def add_trte_args(parser):
    parser.add_argument(
        '--vectors',
        required=True,
        help='Phenotype vectors CSV.',
    )
    parser.add_argument(
        '--trees',
        type=int,
        help='Number of totally random trees.',
        default=defaults.TRTE_TREES,
    )
    parser.add_argument(
        '--max_depth', '--max-depth',
        dest='max_depth',
        type=int,
        help='Maximum depth of the random trees.',
        default=defaults.TRTE_MAX_DEPTH,
    )
    parser.add_argument(
        '--dims',
        type=int,
        help='Embedding dimensions.',
        default=defaults.DIMS,
    )
    parser.add_argument(
        '--seed',
        type=int,
        help='Random seed.',
        default=defaults.SEED,
    )
    parser.add_argument(
        '--out',
        required=True,
        help='Output coordinates CSV.',
    )
    parser.add_argument(
        '--distances_out', '--distances-out',
        dest='distances_out',
        help='Also write Euclidean distances between the embedded subjects to this CSV.',
    )


def add_supervised_args(parser):
    parser.add_argument(
        '--labels',
        required=True,
        help='Labels CSV.',
    )
    parser.add_argument(
        '--vectors',
        required=True,
        help='Phenotype vectors CSV.',
    )
    parser.add_argument(
        '--dims',
        type=int,
        help='Manifold dimensions kept.',
        default=defaults.DIMS,
    )
    parser.add_argument(
        '--out',
        required=True,
        help='Output distance CSV.',
    )
