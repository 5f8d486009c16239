from rfdm.evaluate import experiment


def add_experiment_args(parser):
    parser.add_argument(
        '--spec',
        help='Experiment spec JSON.',
        default=None,
    )
    parser.add_argument(
        '--experiment',
        help='Experiment id, used when no spec file is given.',
        default='E1',
        choices=sorted(experiment.EXPERIMENTS),
    )
    parser.add_argument(
        '--out_dir', '--out-dir',
        dest='out_dir',
        required=True,
        help='Run directory.',
    )


def add_roc_args(parser):
    parser.add_argument(
        '--ranking',
        required=True,
        help='Ranking TSV from rank-snps or rank-pairs.',
    )
    parser.add_argument(
        '--truth',
        required=True,
        help='truth.json written by simulate.',
    )
    parser.add_argument(
        '--out',
        required=True,
        help='Output ROC CSV.',
    )


def add_plot_args(parser):
    parser.add_argument(
        '--in',
        dest='input',
        nargs='+',
        required=True,
        help='ROC CSV files.',
    )
    parser.add_argument(
        '--labels',
        help='Comma separated curve labels, defaults to file names.',
        default=None,
    )
    parser.add_argument(
        '--title',
        default=None,
    )
    parser.add_argument(
        '--out',
        required=True,
        help='Output SVG.',
    )
