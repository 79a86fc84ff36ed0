"""Limit densities of the recursion Y_n = max(Y_{n-1}, alpha Y_{n-1} + X_n).

The package evaluates the one-parameter family of limit densities
h(x; gamma, alpha) interpolating the Frechet law (alpha = 0) and a
Wright/Fox-type density (alpha = 1), together with its Mellin transform,
generating function, and Laplace transform, by several independent
numerical routes that cross-validate each other:

- mellin:     hypergeometric-product Mellin transform and Mellin-Barnes
              contour inversion (density, cdf, generating function)
- closedform: the alpha = 0 and alpha = 1 boundary laws and the
              large-gamma approximation
- laplace_cf: Laplace-transform power series and its equivalent
              continued fraction
- validate:   normalization, integral-equation residuals, bounds,
              and mode location
- simulate:   Monte Carlo runs of the recursion itself
- cli:        command-line surface over all of the above
"""

from ._version import __version__
from .errors import (
    AlphaSunError,
    ConfigError,
    ConvergenceError,
    DivergentRegime,
    DomainError,
    OverflowGuard,
    PoleError,
)
from .types import EvalResult, MellinConfig, Params, QuadConfig, SimConfig

__all__ = [
    "__version__",
    "AlphaSunError",
    "ConfigError",
    "ConvergenceError",
    "DivergentRegime",
    "DomainError",
    "OverflowGuard",
    "PoleError",
    "EvalResult",
    "MellinConfig",
    "Params",
    "QuadConfig",
    "SimConfig",
]
