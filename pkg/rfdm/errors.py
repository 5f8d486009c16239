"""Error types raised by rfdm.

Data errors (bad input) map to CLI exit code 2, numerical failures to 3.
"""


class RFDMError(Exception):
    exit_code = 1


class DataError(RFDMError, ValueError):
    exit_code = 2


class NumericalError(RFDMError, RuntimeError):
    exit_code = 3


class EmptyInput(DataError):
    pass


class MalformedCell(DataError):
    def __init__(self, row, col, value, reason='expected 0, 1 or 2'):
        self.row = row
        self.col = col
        self.value = value
        super(MalformedCell, self).__init__(
            'Malformed cell at row %d, column %d: %r (%s)' % (row, col, value, reason)
        )


class DuplicateId(DataError):
    def __init__(self, kind, identifier):
        self.kind = kind
        self.identifier = identifier
        super(DuplicateId, self).__init__('Duplicate %s id: %r' % (kind, identifier))


class DimensionMismatch(DataError):
    pass


class InvalidWeights(DataError):
    pass


class NegativeDistance(DataError):
    def __init__(self, i, j, value):
        self.indices = (i, j)
        super(NegativeDistance, self).__init__('Negative distance D[%d, %d] = %g' % (i, j, value))


class NonzeroDiagonal(DataError):
    def __init__(self, i, value):
        self.indices = (i, i)
        super(NonzeroDiagonal, self).__init__('Nonzero diagonal D[%d, %d] = %g' % (i, i, value))


class AsymmetryAboveTolerance(DataError):
    def __init__(self, i, j, diff):
        self.indices = (i, j)
        super(AsymmetryAboveTolerance, self).__init__(
            'Asymmetric distances at (%d, %d): |D_ij - D_ji| = %g' % (i, j, diff)
        )


class TriangleViolation(DataError):
    def __init__(self, i, j, k, excess):
        self.indices = (i, k)
        self.via = j
        super(TriangleViolation, self).__init__(
            'Triangle inequality violated at (%d, %d) via %d: D_ij + D_jk < D_ik by %g' % (i, k, j, excess)
        )


class NotPositiveDefinite(DataError):
    def __init__(self, index, min_eig, max_eig):
        self.index = index
        super(NotPositiveDefinite, self).__init__(
            'Matrix %s is not positive definite (eigenvalues in [%g, %g])' % (index, min_eig, max_eig)
        )


class VertexSetMismatch(DataError):
    pass


class InsufficientSubjects(DataError):
    pass


class InsufficientLoci(DataError):
    pass


class DegenerateSpectrum(NumericalError):
    pass


class DisconnectedGraph(NumericalError):
    def __init__(self, components):
        self.components = components
        sizes = ', '.join(str(len(c)) for c in components[:10])
        super(DisconnectedGraph, self).__init__(
            'Similarity graph has %d connected components (sizes: %s); first members: %s' % (
                len(components), sizes, [int(c[0]) for c in components[:10]])
        )


class ConvergenceError(NumericalError):
    def __init__(self, message, gap=None):
        self.gap = gap
        super(ConvergenceError, self).__init__(message)


class UnreachableTarget(NumericalError):
    pass
