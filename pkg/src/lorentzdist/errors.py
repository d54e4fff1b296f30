"""Exception types shared across the toolkit."""


class ToolkitError(Exception):
    """Base class for all toolkit-specific errors."""


class BasePointMismatch(ToolkitError):
    """Tangent vectors evaluated at different base points."""


class ChartDomainError(ToolkitError):
    """Point outside the chart domain (non-finite or wrong dimension)."""


class NonCausalSegment(ToolkitError):
    """A curve segment has a spacelike or past-directed tangent."""


class NoCausalPath(ToolkitError):
    """No future-directed causal curve exists between the given points."""


class ClosedFormUnavailable(ToolkitError):
    """The spacetime has no closed-form distance; use the sandwich bounds."""


class UndefinedPoint(ToolkitError):
    """Field gradient requested on its declared non-differentiability set."""


class NonTimelikeInput(ToolkitError):
    """Operation requires timelike vectors."""


class ChainNotCausal(ToolkitError):
    """The chain p, q, r is not causally ordered."""


class PairNotCausal(ToolkitError):
    """The pair p, q is not causally ordered as required."""


class PairNotFuture(PairNotCausal):
    """q is not in the causal future of p."""


class PairNotPast(PairNotCausal):
    """q is not in the causal past of p."""


class PairNotUnrelated(PairNotCausal):
    """p and q are causally related but must not be."""


class UnsupportedSpacetime(ToolkitError):
    """Operation is only defined for part of the catalog."""


class CoverageImpossible(ToolkitError):
    """Generator arcs cannot cover the surface outside the guards' pasts."""

    def __init__(self, message, uncovered=()):
        super().__init__(message)
        self.uncovered = tuple(uncovered)


class DisjointTracesImpossible(ToolkitError):
    """Could not separate the two cone traces on the surface."""


class WitnessRejected(ToolkitError):
    """A constructed field failed its admissibility re-check (construction bug)."""


class ContractViolation(ToolkitError):
    """A run-level numeric contract did not hold."""


class ConfigError(ToolkitError):
    """Invalid run configuration."""
