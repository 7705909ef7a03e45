"""Exception types shared across the package.

Each class names the invariant it reports; messages carry the offending data.
"""


class ArborealError(Exception):
    """Base class for every validation or domain error raised by this package."""


# tree validation

class EmptyVertexSet(ArborealError):
    pass


class Disconnected(ArborealError):
    pass


class CycleDetected(ArborealError):
    pass


class BadEdge(ArborealError):
    pass


class UnknownVertex(ArborealError):
    pass


# correspondences

class EmptyS(ArborealError):
    pass


class DisconnectedS(ArborealError):
    pass


class EdgeNotInS(ArborealError):
    pass


class MismatchedTree(ArborealError):
    pass


# charts and the rectilinear hypersurface

class BadIndexSet(ArborealError):
    pass


class NotInChart(ArborealError):
    """The point does not lie in the requested Euclidean chart."""


class NonpositiveScale(ArborealError):
    pass


class NotOnHypersurface(ArborealError):
    pass


# sheaf model

class RootHasNoParent(ArborealError):
    pass


class NotAChainMap(ArborealError):
    pass


class NotComparable(ArborealError):
    pass


class NotUpClosed(ArborealError):
    pass


class AxisNotZero(ArborealError):
    pass


class NotInSpan(ArborealError):
    pass


# quiver side

class ShapeMismatch(ArborealError):
    pass


class BrokenDifferential(ArborealError):
    pass


class TableMismatch(ArborealError):
    pass


# exports

class DimensionTooHigh(ArborealError):
    pass
