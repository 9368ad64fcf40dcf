"""Exceptions raised by tate-derham.

Library code raises these; the CLI maps ``MathematicalFailure`` to exit status 1 and
``UsageFailure`` to exit status 2.
"""

from typing import Optional


class TateDRError(Exception):
    """Base class for all tate-derham errors."""


class MathematicalFailure(TateDRError):
    """A computation could not be carried out or certified."""


class UsageFailure(TateDRError):
    """The input was malformed."""


class InexactZero(MathematicalFailure):
    """The value is indistinguishable from zero at the current precision."""


class NotAUnit(MathematicalFailure):
    """The value could not be certified as a unit."""


class LeadingCoefficientNotUnit(MathematicalFailure):
    """The leading coefficient of a relation is not invertible in the Tate algebra."""


class NoStabilization(MathematicalFailure):
    """Cohomology dimensions were still changing at the degree-window cap.

    Args:
        message: Description of the failure.
        trajectory: The dimensions observed at each window, as ``(window, dims)`` pairs.
    """

    def __init__(self, message: str, trajectory: Optional[list[tuple[int, tuple[int, ...]]]] = None):
        super().__init__(message)
        self.trajectory = trajectory or []


class NoModelAvailable(MathematicalFailure):
    """The connection has no certified integral model."""


class InconclusiveRoute(MathematicalFailure):
    """Neither computation route applies to the input."""


class WindowTooSmall(MathematicalFailure):
    """The requested truncation window cannot hold the computation."""


class UnsupportedCoefficients(MathematicalFailure):
    """The relations cannot be read as polynomial data."""


class UnsupportedPresentation(MathematicalFailure):
    """No chain-level model is available for the presentation."""


class OperatorSyntaxError(UsageFailure):
    """An operator expression could not be parsed.

    Args:
        message: Description of the failure.
        position: Zero-based character offset of the failure in the source text.
    """

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at position {position}")
        self.position = position


class IndexOutOfRange(UsageFailure):
    """A variable index exceeds the declared number of variables."""
