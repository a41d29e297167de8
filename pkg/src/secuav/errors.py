"""Exception types shared across the planning library."""


class SecuavError(Exception):
    """Base class for all library errors."""


class DimensionMismatch(SecuavError):
    """Array arguments do not agree on K or N."""


class DegenerateGeometry(SecuavError):
    """Eve is co-located with a user, so no positive secrecy rate exists."""


class InfeasibleHorizon(SecuavError):
    """The hover construction does not fit in the requested slot count."""


class NeverCompletes(SecuavError):
    """A baseline scheme cannot deliver the content in finite time."""


class InstanceTooLarge(SecuavError):
    """Exhaustive enumeration was requested for an instance beyond desk scale."""


class MaxIterations(SecuavError):
    """An iterative solver hit its iteration cap before reaching tolerance.

    Carries the best iterate found so far in ``payload`` together with the
    achieved residuals, so callers can inspect what was reached.
    """

    def __init__(self, message, payload=None):
        super().__init__(message)
        self.payload = payload


class NumericalFailure(SecuavError):
    """Non-finite values encountered inside a solver."""


class InfeasibleBracket(SecuavError):
    """The upper end of the bisection bracket is not feasible."""


class NonMonotoneObjective(SecuavError):
    """Internal assertion: the penalized objective trace decreased."""


class ScenarioFormatError(SecuavError):
    """A scenario file failed to parse or is missing a required field."""
