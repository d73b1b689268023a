"""Exception hierarchy.

Input problems raise ``ValueError`` subclasses; numerical failures derive from
:class:`NumericalError` so that callers (and the CLI) can tell them apart.
"""


class DQError(Exception):
    """Base class for all dqlab errors."""


class InvalidInputError(DQError, ValueError):
    """An argument violates a documented precondition."""


class NumericalError(DQError):
    """A numerical procedure could not produce a value."""


class UnsupportedMeasureError(NumericalError):
    """The requested risk measure is not finite for the model (e.g. ES with infinite mean)."""


class CalibrationError(NumericalError):
    """A root-finding calibration (e.g. PELVE) has no root in its bracket."""


class LimitDoesNotExistError(NumericalError):
    """A numerically extrapolated limit failed to settle."""


class UndefinedDRError(NumericalError):
    """The diversification ratio has a zero denominator."""


class ConvergenceError(NumericalError):
    """An iterative solver hit its iteration cap."""
