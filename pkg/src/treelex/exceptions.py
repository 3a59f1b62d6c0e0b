"""Exception hierarchy shared by all treelex modules."""


class TreelexError(ValueError):
    """Base class for every error raised by treelex."""


# forests

class ForestError(TreelexError):
    pass


class CycleDetected(ForestError):
    pass


class DanglingParent(ForestError):
    pass


class RootMismatch(ForestError):
    pass


class DuplicateVertex(ForestError):
    pass


class UnknownVertex(ForestError, KeyError):
    pass


class NotInitialSegment(ForestError):
    pass


# group elements

class ForestMismatch(TreelexError):
    """Two elements live over different forests."""


class EmptyForest(TreelexError):
    pass


class LengthMismatch(TreelexError):
    pass


class CertificateNotFound(TreelexError):
    """No order-unit certificate ``n`` exists below the requested bound."""

    def __init__(self, n_bound):
        super().__init__(f"no certificate n <= {n_bound}")
        self.n_bound = n_bound


class NotPrime(TreelexError):
    pass


class NonPositive(TreelexError):
    pass


# reconstruction

class PoolOverflow(TreelexError):
    pass


class EmptySelection(TreelexError):
    pass


class ReconstructionIncomplete(TreelexError):
    pass


# geometry

class GeometryError(TreelexError):
    pass


class DimensionMismatch(GeometryError):
    pass


class EqualPoints(GeometryError):
    pass


class PointOutsideSupport(GeometryError):
    pass


class EdgeNotPresent(GeometryError):
    pass


class NameCollision(GeometryError):
    pass


class NotMaximal(GeometryError):
    pass


class NotPresent(GeometryError):
    pass


class MissingRootCell(GeometryError):
    pass


class NotPairwiseDisjoint(GeometryError):
    pass


class ConditionVViolated(GeometryError):
    pass


class NotATree(GeometryError):
    pass


class StellarStepError(GeometryError):
    """A script step failed; ``index`` is the 0-based step position."""

    def __init__(self, index, cause):
        super().__init__(f"step {index}: {cause}")
        self.index = index
        self.cause = cause


# piecewise-linear functions

class OutOfBox(TreelexError):
    pass


class SizeOverflow(TreelexError):
    pass


class UnsupportedDimension(TreelexError):
    pass


# expressions

class ExpressionSyntaxError(TreelexError):
    def __init__(self, message, position):
        super().__init__(f"{message} at position {position}")
        self.position = position


class UnknownOperatorInMode(ExpressionSyntaxError):
    pass


class UnboundName(TreelexError, KeyError):
    pass


class UnknownSuite(TreelexError):
    pass
