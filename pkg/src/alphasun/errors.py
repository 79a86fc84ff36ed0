"""Exception hierarchy for the alphasun package.

Every exception carries an optional ``diagnostics`` dict so callers can
inspect what the numerical routine saw before giving up.
"""


class AlphaSunError(Exception):
    """Base class for all package errors."""

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = dict(diagnostics) if diagnostics else {}


class DomainError(AlphaSunError, ValueError):
    """Input outside the mathematical domain of an operation."""


class PoleError(DomainError):
    """Evaluation requested at (or too close to) a pole."""


class ConvergenceError(AlphaSunError):
    """A series, product, or iterative scheme failed to converge."""


class ToleranceNotMet(ConvergenceError):
    """Quadrature finished but could not certify the requested tolerance.

    The best estimate is attached as ``result`` (an EvalResult).
    """

    def __init__(self, message, result=None, diagnostics=None):
        super().__init__(message, diagnostics)
        self.result = result


class MaxSubdivisions(ConvergenceError):
    """Adaptive quadrature exhausted its subdivision budget."""


class AccelerationStalled(ConvergenceError):
    """Sequence acceleration produced inconsistent extrapolants."""


class DivergentRegime(AlphaSunError):
    """A series was requested outside its region of convergence."""


class ZeroDenominator(AlphaSunError):
    """A continued-fraction denominator vanished and could not be rescued."""


class NonConvergence(ConvergenceError):
    """Continued fraction failed to settle within the depth cap."""


class BoundViolation(AlphaSunError):
    """A proven pointwise bound failed numerically.

    ``x`` records the offending abscissa.
    """

    def __init__(self, message, x=None, diagnostics=None):
        super().__init__(message, diagnostics)
        self.x = x


class BracketFailure(AlphaSunError):
    """Mode search could not bracket a maximum."""


class OverflowGuard(AlphaSunError):
    """A simulated path left the safe floating-point exponent range."""


class ConfigError(AlphaSunError):
    """Malformed configuration file or environment override."""
