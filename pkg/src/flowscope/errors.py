"""Exception types raised across the toolkit."""

from __future__ import annotations


class FlowscopeError(Exception):
    """Base class for all toolkit errors."""


class ValidationError(FlowscopeError):
    """A network or placement failed validation.

    Carries the full violation list so callers can report every problem at
    once instead of the first one found.
    """

    def __init__(self, violations: list[str]):
        self.violations = list(violations)
        super().__init__("; ".join(self.violations) or "invalid input")


class ZeroReferenceError(FlowscopeError):
    """A turning factor was requested against a zero-ratio reference arc."""


class CanonicalArcError(FlowscopeError):
    """A vertex has no outgoing arc with a nonzero turning ratio."""


class UnderdeterminedBoundaryError(FlowscopeError):
    """A boundary vertex has zero turning ratio on every arc into the
    monitored set, so its outflow total cannot be deduced (strict mode)."""


class RankDeficientError(FlowscopeError):
    """The flow system does not have full column rank; flows are not unique."""


class InconsistentObservationsError(FlowscopeError):
    """Observed flows contradict conservation or the turning ratios."""


class ConservationError(FlowscopeError):
    """Boundary data handed to the tree solver violates flow conservation."""


class CentroidPresentError(FlowscopeError):
    """A subtree expected to be centroid-free contains a centroid."""


class PairingConditionError(FlowscopeError):
    """Disjoint centroid-to-boundary paths do not exist, so no pairing."""


class InvalidCutError(FlowscopeError):
    """A claimed separator does not actually separate the two vertex sets."""


class NoConsistentFlowError(FlowscopeError):
    """No flow satisfies the requested balancing assignment."""


class ScenarioError(FlowscopeError):
    """A scenario request is malformed or infeasible."""


class DocumentError(FlowscopeError):
    """A network document could not be parsed."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        prefix = f"line {line}: " if line is not None else ""
        super().__init__(prefix + message)


class SingularSystemError(FlowscopeError):
    """Low-level exact solve hit a rank-deficient matrix."""


class InconsistentSystemError(FlowscopeError):
    """Low-level exact solve hit an inconsistent right-hand side."""
