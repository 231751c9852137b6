"""Exception hierarchy for robustupdate.

Every error raised on a contract violation derives from RobustUpdateError so
callers can catch library failures without swallowing programming errors.
"""

from __future__ import annotations


class RobustUpdateError(Exception):
    """Base class for all library-specific errors."""


class InvalidDistributionError(RobustUpdateError, ValueError):
    """A probability vector, box, or family violates its invariants."""


class EmptySampleError(RobustUpdateError, ValueError):
    """An operation that needs at least one observation got an empty sample."""


class EmptyFamilyError(RobustUpdateError, ValueError):
    """A hull or decision was requested for a family with no members."""


class HorizonTooLargeError(RobustUpdateError, ValueError):
    """A joint-outcome table or vertex enumeration would exceed the size cap."""


class SingularCovarianceError(RobustUpdateError, ValueError):
    """A covariance matrix could not be factorized for inversion."""


class ZeroEvidenceError(RobustUpdateError, ValueError):
    """All candidate likelihoods are zero; no posterior or argmax exists."""


class WitnessNotFoundError(RobustUpdateError, RuntimeError):
    """A search for a counterexample exhausted its budget without success."""


class ConfigError(RobustUpdateError, ValueError):
    """An experiment configuration is malformed.

    Carries the offending field path and, when the source text is available,
    the 1-based line number of the field in the JSON document.
    """

    def __init__(self, message: str, *, field: str | None = None,
                 line: int | None = None) -> None:
        self.field = field
        self.line = line
        prefix = ""
        if line is not None:
            prefix = f"line {line}: "
        if field:
            prefix += f"{field}: "
        super().__init__(prefix + message)
