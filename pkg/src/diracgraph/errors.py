"""Exception hierarchy shared by all modules."""


class DiracGraphError(Exception):
    """Base class for every error raised by :mod:`diracgraph`."""


class GraphError(DiracGraphError, ValueError):
    """Invalid graph topology or parametrization."""


class UnknownEdge(GraphError, KeyError):
    pass


class ConditionError(DiracGraphError, ValueError):
    """Malformed transmission conditions."""


class MissingVertex(ConditionError):
    pass


class SizeMismatch(ConditionError):
    pass


class NonSquare(ConditionError):
    pass


class BranchPoint(DiracGraphError, ValueError):
    """Evaluation at z = +-m where alpha(z) is undefined."""


class ReferencePoint(DiracGraphError, ValueError):
    """Evaluation at a point of the reference spectrum.

    ``edge`` names the offending edge when known.
    """

    def __init__(self, message, edge=None):
        super().__init__(message)
        self.edge = edge


class NotDecaying(DiracGraphError, ValueError):
    """Requested a decaying half-line solution where Im k(z) <= 0."""


class ThresholdRegion(DiracGraphError, ValueError):
    """Oracle system requested at a z with Im k(z) = 0 on a non-compact graph."""


class NotInResolventSet(DiracGraphError, ValueError):
    """The Birman-Schwinger matrix is numerically singular at the requested z."""


class ContourThroughZero(DiracGraphError, RuntimeError):
    """A zero or pole of the sampled function lies on (or too close to) a contour."""


class TopologyMismatch(DiracGraphError, ValueError):
    pass


class ProblemFileError(DiracGraphError, ValueError):
    """Schema or consistency violation in a problem file; ``path`` locates it."""

    def __init__(self, message, path=""):
        super().__init__(f"{path}: {message}" if path else message)
        self.path = path
