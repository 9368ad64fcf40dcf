"""Simple types used in reports."""

from enum import Enum


class ErrorType(str, Enum):
    """Enum for error types."""

    MATHEMATICAL = "mathematical"
    """The computation could not be carried out or certified at the given precision."""
    USAGE = "usage"
    """The input was malformed."""


class ZeroTest(str, Enum):
    """Outcome of testing a value against zero."""

    ZERO = "zero"
    """The value is exactly zero."""
    NONZERO = "nonzero"
    """The value has a known nonzero leading coefficient."""
    INDISTINGUISHABLE = "indistinguishable"
    """The value is zero up to its precision but cannot be certified to be zero."""


class ModelVerdict(str, Enum):
    """Verdict of the spectral-radius estimate on the existence of an integral model."""

    MODEL_CERTIFIED = "model-certified"
    """The connection matrix is integral and every iterate has norm at most one."""
    NO_MODEL = "no-model"
    """The iterates grow, certifying a spectral radius above one."""
    INCONCLUSIVE = "inconclusive"
    """Neither of the above could be established."""


class VerifySuite(str, Enum):
    """The verification suites runnable from the command line."""

    NORMS = "norms"
    INVERSION = "inversion"
    PROPERTIES = "properties"
    DR_DISC = "dr-disc"
    LAMBDA_FAMILY = "lambda-family"
    HOLONOMICITY = "holonomicity"
    DIRECT_IMAGE = "direct-image"
    HOMOTOPY = "homotopy"
    SPENCER = "spencer"
    CHI_TRANSFER = "chi-transfer"
    ALL = "all"


class DirectImageCheck(str, Enum):
    """Checks offered by the ``direct-image`` subcommand."""

    SHIFT = "shift"
    HOMOTOPY = "homotopy"
    CHAINMAP = "chainmap"
