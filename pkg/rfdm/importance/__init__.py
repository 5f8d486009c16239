from rfdm import defaults
from rfdm.importance import gini


def add_rank_args(parser, pairs=False):
    parser.add_argument(
        '--forest',
        required=True,
        help='Forest file.',
    )
    parser.add_argument(
        '--out',
        required=True,
        help='Output ranking TSV.',
    )
    if pairs:
        parser.add_argument(
            '--variant',
            help='Left/right imbalance measure.',
            default=defaults.PAIR_VARIANT,
            choices=gini.PAIR_VARIANTS,
        )
