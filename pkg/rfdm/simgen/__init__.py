from rfdm import defaults
from rfdm.tools import utils


def add_simulate_args(parser):
    parser.add_argument(
        '--config',
        help='Simulation config JSON; missing keys take their defaults.',
        default=None,
    )
    parser.add_argument(
        '--seed',
        type=int,
        help='Master seed, overrides the config.',
        default=None,
    )
    parser.add_argument(
        '--out_dir', '--out-dir',
        dest='out_dir',
        required=True,
        help='Directory for genotypes, phenotypes, labels and truth.json.',
    )


def add_penetrance_plot_args(parser):
    parser.add_argument(
        '--penetrances',
        type=utils.float_list,
        help='Comma separated penetrance levels.',
        default=defaults.PENETRANCE_LEVELS,
    )
    parser.add_argument(
        '--out',
        required=True,
        help='Output SVG.',
    )
