"""Shared value types: parameter pairs, result records, and configurations.

All types are frozen dataclasses so they can be hashed, cached on, and
shared between threads without defensive copying.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

from .errors import ConvergenceError, DomainError

# Methods that analytically require alpha < 1 reject anything closer to 1
# than this (the Mellin-Barnes representation hypothesis reads
# 0 <= alpha < 1 - delta).  alpha = 1 itself is served by closed forms.
DELTA_MAX = 1e-3


@dataclass(frozen=True)
class Params:
    """The pair (gamma, alpha) selecting one member of the density family.

    gamma > 0 is the tail exponent of the input distribution; alpha in
    [0, 1] interpolates between the running maximum (alpha = 0) and the
    positive-part running sum (alpha = 1).
    """

    gamma: float
    alpha: float

    def __post_init__(self):
        if not (self.gamma > 0 and math.isfinite(self.gamma)):
            raise DomainError(f"gamma must be positive and finite, got {self.gamma}")
        if not (0.0 <= self.alpha <= 1.0):
            raise DomainError(f"alpha must lie in [0, 1], got {self.alpha}")

    @property
    def is_max_only(self) -> bool:
        return self.alpha == 0.0

    @property
    def is_sum_only(self) -> bool:
        return self.alpha == 1.0

    def require_alpha_lt1(self, who: str = "this operation") -> None:
        """Reject alpha too close to 1 for the general-alpha machinery."""
        if self.alpha > 1.0 - DELTA_MAX:
            raise DomainError(
                f"{who} requires alpha <= {1.0 - DELTA_MAX}; got alpha={self.alpha}. "
                "The alpha = 1 boundary is served by the closedform module."
            )

    def require_gamma_lt1(self, who: str = "this operation") -> None:
        if self.gamma >= 1.0:
            raise DomainError(f"{who} requires gamma < 1; got gamma={self.gamma}")


@dataclass(frozen=True)
class EvalResult:
    """A numeric value plus its error estimate and provenance.

    value must be finite: non-finite intermediate results surface as
    exceptions, never as records.
    """

    value: float | complex
    abs_err: float
    method: str
    n_evals: int = 0
    terms_used: int = 0

    def __post_init__(self):
        v = self.value
        finite = (
            math.isfinite(v.real) and math.isfinite(v.imag)
            if isinstance(v, complex)
            else math.isfinite(v)
        )
        if not finite:
            raise ConvergenceError(
                f"non-finite value {v!r} from method {self.method!r}"
            )
        if not (self.abs_err >= 0.0):
            raise ConvergenceError(f"negative abs_err {self.abs_err!r}")


@dataclass(frozen=True)
class QuadConfig:
    """Adaptive-quadrature error goals, mirroring the reference protocol."""

    abs_tol: float = 1e-6
    rel_tol: float = 1e-4
    max_subdivisions: int = 200

    def __post_init__(self):
        if not (self.abs_tol > 0):
            raise DomainError("abs_tol must be positive")
        if not (self.rel_tol >= 0):
            raise DomainError("rel_tol must be non-negative")
        if not (self.max_subdivisions >= 1):
            raise DomainError("max_subdivisions must be >= 1")


@dataclass(frozen=True)
class MellinConfig:
    """Contour and product-truncation settings for the Mellin engine.

    contour_c is the real abscissa of the inversion contour (must be < 1
    for the density, and in (0, 1 + 1/gamma) for the generating function);
    product_J is the number of explicit hypergeometric factors before the
    digamma tail estimate takes over; tail_order 1 adds one Richardson
    step on (J/2, J).
    """

    contour_c: float = 0.5
    product_J: int = 8192
    tail_order: int = 1
    quad: QuadConfig = field(default_factory=QuadConfig)

    def __post_init__(self):
        if self.product_J < 16:
            raise DomainError("product_J must be >= 16")
        if self.tail_order not in (0, 1):
            raise DomainError("tail_order must be 0 or 1")


@dataclass(frozen=True)
class ProductValue:
    """Log of a truncated hypergeometric-ratio product plus its tail."""

    log_value: complex
    tail_correction: complex
    J_used: int

    @property
    def value(self) -> complex:
        out = complex(self.log_value) + complex(self.tail_correction)
        v = cmath.exp(out)
        if not (math.isfinite(v.real) and math.isfinite(v.imag)) or v == 0:
            raise ConvergenceError(f"product exponent out of range: {out!r}")
        return v


@dataclass(frozen=True)
class RationalGamma:
    """gamma = p/q in lowest terms, restricted to {1/2, 1/3, 2/3}."""

    p: int
    q: int

    def __post_init__(self):
        if not (0 < self.p < self.q <= 3):
            raise DomainError(f"RationalGamma requires p < q <= 3, got {self.p}/{self.q}")
        if math.gcd(self.p, self.q) != 1:
            raise DomainError(f"{self.p}/{self.q} is not in lowest terms")

    @property
    def value(self) -> float:
        return self.p / self.q

    @classmethod
    def from_float(cls, gamma: float, tol: float = 1e-12) -> "RationalGamma | None":
        """Return the matching rational form, or None if gamma is not one."""
        for p, q in ((1, 2), (1, 3), (2, 3)):
            if abs(gamma - p / q) < tol:
                return cls(p, q)
        return None


@dataclass(frozen=True)
class CFState:
    """Snapshot of a continued-fraction evaluation."""

    depth: int
    convergent: float
    delta: float

    def __post_init__(self):
        if self.depth < 1:
            raise DomainError("depth must be >= 1")
        if not (self.delta >= 0):
            raise DomainError("delta must be >= 0")


@dataclass(frozen=True)
class SimConfig:
    """Monte Carlo settings for the recursion Y_n = max(Y_{n-1}, alpha*Y_{n-1} + X_n)."""

    params: Params
    n_steps: int
    n_paths: int
    seed: int = 0
    input_dist: str = "pareto"
    norming_exponent: float | None = None

    def __post_init__(self):
        if self.n_steps < 1 or self.n_paths < 1:
            raise DomainError("n_steps and n_paths must be >= 1")
        if self.input_dist not in ("pareto", "frechet"):
            raise DomainError(f"unknown input_dist {self.input_dist!r}")

    @property
    def exponent(self) -> float:
        """Norming exponent: defaults to 1/gamma for Phi_gamma-domain inputs."""
        if self.norming_exponent is not None:
            return self.norming_exponent
        return 1.0 / self.params.gamma


@dataclass(frozen=True)
class TableReport:
    """Grid of per-cell normalization and residual errors.

    norm_errors and residual_errors are tuples of row tuples indexed
    [i_gamma][i_alpha]; failed cells hold nan and are listed in failures.
    """

    gammas: tuple
    alphas: tuple
    norm_errors: tuple
    residual_errors: tuple
    failures: tuple = ()
    runtime_s: float = 0.0

    def max_norm_error(self) -> float:
        return max((v for row in self.norm_errors for v in row if v == v), default=math.nan)

    def max_residual_error(self) -> float:
        return max((v for row in self.residual_errors for v in row if v == v), default=math.nan)

    def _csv(self, table) -> str:
        header = "gamma," + ",".join(f"{a:g}" for a in self.alphas)
        lines = [header]
        for g, row in zip(self.gammas, table):
            lines.append(f"{g:g}," + ",".join(f"{v:.17g}" for v in row))
        return "\n".join(lines) + "\n"

    def norm_csv(self) -> str:
        return self._csv(self.norm_errors)

    def residual_csv(self) -> str:
        return self._csv(self.residual_errors)

    def to_dict(self) -> dict:
        return {
            "gammas": list(self.gammas),
            "alphas": list(self.alphas),
            "norm_errors": [list(r) for r in self.norm_errors],
            "residual_errors": [list(r) for r in self.residual_errors],
            "max_norm_error": self.max_norm_error(),
            "max_residual_error": self.max_residual_error(),
            "failures": [list(f) for f in self.failures],
            "runtime_s": self.runtime_s,
        }
