"""Exception hierarchy.

Everything raised on purpose by this package derives from ResLearnError,
so callers (and the CLI) can distinguish domain failures from bugs.
"""


class ResLearnError(Exception):
    """Base class for all errors raised by reslearn."""


class InvalidPairError(ResLearnError):
    """A node pair is out of range, repeated, or has u == v."""


class InvalidParameterError(ResLearnError):
    """A parameter is outside its documented domain."""


class DisconnectedGraphError(ResLearnError):
    """An operation that needs a connected graph got a disconnected one."""


class NotPSDError(ResLearnError):
    """A matrix required to be positive semidefinite has a significantly
    negative eigenvalue."""


class FileFormatError(ResLearnError):
    """A data file failed to parse.

    Carries the path and 1-based line number when known.
    """

    def __init__(self, message, path=None, line=None):
        loc = ""
        if path is not None:
            loc = str(path)
            if line is not None:
                loc += f":{line}"
            loc = loc + ": "
        super().__init__(loc + message)
        self.path = path
        self.line = line


class EmptySampleError(ResLearnError):
    """A sampling request produced zero pairs."""


class InfeasibleMeasurementsError(ResLearnError):
    """Measurements are inconsistent with every connected graph."""


class IncompletableError(ResLearnError):
    """The measurement pairs do not connect all nodes, so the table
    cannot be completed."""


class NotATreeInstanceError(ResLearnError):
    """Tree recovery produced a graph that does not reproduce the
    supplied measurements."""


class InconsistentPPRError(ResLearnError):
    """A matrix claimed to be a personalized PageRank matrix does not
    invert to any undirected graph."""


class NoInformationError(ResLearnError):
    """The input carries no information about the graph (for example a
    walk that never leaves its start node)."""


class UndefinedMetricError(ResLearnError):
    """A metric's denominator is zero."""
