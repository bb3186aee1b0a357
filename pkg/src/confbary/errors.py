"""Exception hierarchy shared by all modules."""


class ConfbaryError(Exception):
    """Base class for errors raised by this package."""


class GeometryError(ConfbaryError, ValueError):
    """Invalid geometric input (wrong dimension, point outside the ball, ...)."""


class DegenerateConfigurationError(GeometryError):
    """A shift denominator fell below the boundary guard."""


class PrecisionLossError(GeometryError):
    """A ball point came too close to a sphere point for reliable arithmetic."""


class UnstableMeasureError(ConfbaryError):
    """The measure has no unique conformal barycenter."""


class ConvergenceError(ConfbaryError):
    """A solver terminated without meeting its stopping criterion.

    The partial :class:`~confbary.solvers.SolveResult` is attached as ``result``.
    """

    def __init__(self, message, result=None):
        super().__init__(message)
        self.result = result


class LineSearchError(ConfbaryError):
    """The weak Wolfe bracketing search ran out of steps or collapsed."""
