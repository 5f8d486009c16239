from rfdm.metric import distances


def add_distance_args(parser):
    parser.add_argument(
        '--metric',
        help='Distance between subject responses.',
        default=distances.EUCLIDEAN,
        choices=distances.METRICS,
    )
    parser.add_argument(
        '--in',
        dest='input',
        required=True,
        help='Vectors CSV, labels CSV, or a matrix/graph bundle directory.',
    )
    parser.add_argument(
        '--out',
        required=True,
        help='Output distance CSV.',
    )


def add_combine_args(parser):
    parser.add_argument(
        '--weights',
        required=True,
        help='Comma separated fusion weights, summing to 1.',
    )
    parser.add_argument(
        '--in',
        dest='input',
        nargs='+',
        required=True,
        help='Distance CSV files to fuse.',
    )
    parser.add_argument(
        '--out',
        required=True,
        help='Output distance CSV.',
    )
