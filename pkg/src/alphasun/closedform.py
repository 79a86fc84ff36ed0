"""Closed-form and limiting-regime densities and transforms.

The two boundary parameter values bracket the general family and anchor
all cross-checks:

* alpha = 0 (pure maximum recursion): Frechet density, Mellin transform,
  and closed-form mode.
* alpha = 1 (pure perpetuity boundary): convergent large-x series,
  oscillatory integral representation, rational-exponent Airy forms,
  explicit Mellin transform, and the small-argument asymptotic.  These
  are three genuinely independent evaluation routes and stay separate so
  they can referee each other.

Also here: the Gumbel-domain fixed-point density and the large-exponent
(elementary) family of density / Mellin / generating / Laplace forms.
"""

from __future__ import annotations

import math

import numpy as np
import scipy.special as _sp

from . import mellin as _mellin
from . import quad as _quad
from .errors import (
    AccelerationStalled,
    ConvergenceError,
    DomainError,
    MaxSubdivisions,
    ToleranceNotMet,
)
from .specfun import airy_ai, airy_ai_prime, log_gamma
from .types import EvalResult, MellinConfig, Params, QuadConfig, RationalGamma

__all__ = [
    "frechet_density",
    "frechet_mellin",
    "alpha1_density_series",
    "alpha1_density_integral",
    "alpha1_density",
    "alpha1_density_mb",
    "alpha1_mellin",
    "alpha1_smallx",
    "alpha1_rational_density",
    "gumbel_density",
    "large_gamma_density",
    "large_gamma_mellin",
    "large_gamma_generating",
    "large_gamma_laplace",
    "mode_alpha0",
]


# ---------------------------------------------------------------------------
# alpha = 0: Frechet

def frechet_density(gamma: float, x: float) -> float:
    """h_0(x) = gamma x^{-gamma-1} exp(-x^{-gamma})."""
    if gamma <= 0.0:
        raise DomainError(f"frechet_density needs gamma > 0, got {gamma}")
    if x <= 0.0:
        raise DomainError(f"frechet_density needs x > 0, got {x}")
    return gamma * x ** (-gamma - 1.0) * math.exp(-(x ** (-gamma)))


def frechet_mellin(gamma: float, s: complex) -> complex:
    """H_0(s) = Gamma((1+gamma-s)/gamma), Re(s) < 1+gamma."""
    if gamma <= 0.0:
        raise DomainError(f"frechet_mellin needs gamma > 0, got {gamma}")
    s = complex(s)
    if s.real >= 1.0 + gamma:
        raise DomainError(f"frechet_mellin requires Re(s) < 1+gamma, got {s}")
    return complex(np.exp(log_gamma((1.0 + gamma - s) / gamma)))


def mode_alpha0(gamma: float) -> tuple[float, float]:
    """Closed-form mode of the Frechet density:

        x_max = ((gamma+1)/gamma)^{-1/gamma},
        h_max = (gamma+1)(1 + 1/gamma)^{1/gamma} e^{-1-1/gamma}.
    """
    if gamma <= 0.0:
        raise DomainError(f"mode_alpha0 needs gamma > 0, got {gamma}")
    x_max = ((gamma + 1.0) / gamma) ** (-1.0 / gamma)
    h_max = (gamma + 1.0) * (1.0 + 1.0 / gamma) ** (1.0 / gamma) * math.exp(-1.0 - 1.0 / gamma)
    return x_max, h_max


# ---------------------------------------------------------------------------
# alpha = 1 family

def _check_alpha1_args(gamma: float, x: float) -> None:
    if not (0.0 < gamma < 1.0):
        raise DomainError(f"alpha = 1 routes need gamma in (0, 1), got {gamma}")
    if x <= 0.0:
        raise DomainError(f"alpha = 1 density needs x > 0, got {x}")


_A1_NMAX = 500


def _alpha1_series_raw(gamma: float, x: float) -> EvalResult:
    """h_1(x) = (1/pi x) sum_{n>=1} (-1)^{n-1} sin(pi n gamma)
                   Gamma(1+n gamma)/n! (Gamma(1-gamma) x^{-gamma})^n.

    Stopping looks at the sin-free envelope: individual terms vanish at
    the sine zeros (every even n at gamma = 1/2, say) without the tail
    being done, so two consecutive small envelopes are required.  The
    returned abs_err carries the cancellation roundoff, proportional to
    the largest envelope met, plus the last envelope.
    """
    q = _sp.gamma(1.0 - gamma) * x ** (-gamma)
    lq = math.log(q)
    total = 0.0
    env_max = 0.0
    env = 0.0
    small_streak = 0
    n_used = 0
    for n in range(1, _A1_NMAX + 1):
        log_env = _sp.gammaln(1.0 + n * gamma) - _sp.gammaln(n + 1.0) + n * lq
        if log_env > 700.0:
            raise ConvergenceError(
                f"alpha=1 series envelope overflows at x={x} (n={n})"
            )
        env = math.exp(log_env)
        total += (-1.0) ** (n - 1) * math.sin(math.pi * n * gamma) * env
        env_max = max(env_max, env)
        n_used = n
        if env < 1e-17 * max(abs(total), env_max * 2.2e-16):
            small_streak += 1
            if n > 8 and small_streak >= 2:
                break
        else:
            small_streak = 0
    else:
        raise ConvergenceError(f"alpha=1 series did not settle in {_A1_NMAX} terms")
    scale = math.pi * x
    return EvalResult(
        value=total / scale,
        abs_err=(2.2e-16 * env_max + env) / scale,
        method="alpha1_series",
        terms_used=n_used,
    )


def _series_envelope_ratio(gamma: float, x: float, n: int = 5) -> float:
    """|term_{n+1}| / |term_n| of the sin-free series envelope."""
    q = _sp.gamma(1.0 - gamma) * x ** (-gamma)
    return q * math.exp(
        _sp.gammaln(1.0 + (n + 1) * gamma) - _sp.gammaln(1.0 + n * gamma)
    ) / (n + 1.0)


def alpha1_density_series(gamma: float, x: float) -> EvalResult:
    """Series route for the alpha = 1 density.

    The series converges for every x but is alternating with
    Gamma(1+n gamma) growth in intermediate terms, so for small x it
    cancels catastrophically; when the envelope term ratio at n = 5
    reaches 0.5 the evaluation is delegated to the integral route.
    """
    _check_alpha1_args(gamma, x)
    if _series_envelope_ratio(gamma, x) < 0.5:
        return _alpha1_series_raw(gamma, x)
    return alpha1_density_integral(gamma, x)


# point past which the e^{-xr} factor has extinguished the integrand
# relative to its peak
_A1_INT_LOG_CUT = 45.0
# largest tolerable peak exponent: the oscillatory integral computes
# e^{-large} answers by cancelling e^{+phimax} pieces, so roundoff buys
# phimax up to about 16 digits' worth
_A1_INT_PEAK_CAP = 690.0
_A1_INT_MAX_PANELS = 400


def alpha1_density_integral(gamma: float, x: float, quad_cfg: QuadConfig | None = None) -> EvalResult:
    """Oscillatory-integral route for the alpha = 1 density,

        h_1(x) = (1/pi) int_0^inf exp(-x r - cos(pi gamma) Gamma(1-gamma) r^gamma)
                     sin((pi/Gamma(gamma)) r^gamma) dr.

    The axis is split at the sine zeros r_n = (n Gamma(gamma))^{1/gamma};
    panels stop once past the envelope peak with a negligible tail bound,
    and the alternating partial sums are epsilon-accelerated if plain
    summation has not settled by the panel cap.  For gamma > 1/2 the
    cosine coefficient is negative, the envelope peaks at
    r* = (-cg gamma / x)^{1/(1-gamma)}, and roundoff relative to
    exp(phi(r*)) bounds the achievable accuracy; ToleranceNotMet carries
    the partial result when that bound swamps the value.
    """
    _check_alpha1_args(gamma, x)
    cfg = quad_cfg or QuadConfig(abs_tol=1e-15, rel_tol=1e-12, max_subdivisions=100)
    B = _sp.gamma(1.0 - gamma)
    cg = math.cos(math.pi * gamma) * B
    sgc = math.pi / _sp.gamma(gamma)

    def phi(r):
        return -x * r - cg * r ** gamma

    r_star, phi_max = 0.0, 0.0
    if cg < 0.0:
        r_star = (-cg * gamma / x) ** (1.0 / (1.0 - gamma))
        phi_max = phi(r_star)
        if phi_max > _A1_INT_PEAK_CAP:
            raise ToleranceNotMet(
                f"alpha=1 integrand peak exp({phi_max:.1f}) overflows at x={x}",
                result=None,
            )
    peak_scale = math.exp(max(phi_max, 0.0))

    def f(r):
        return math.exp(phi(r)) * math.sin(sgc * r ** gamma)

    total = 0.0
    quad_err = 0.0
    n_evals = 0
    partials = []
    converged = False
    r_lo = 0.0
    for n in range(1, _A1_INT_MAX_PANELS + 1):
        r_hi = (n * _sp.gamma(gamma)) ** (1.0 / gamma)
        try:
            res = _quad.integrate_finite(f, r_lo, r_hi, cfg)
        except MaxSubdivisions as exc:
            raise ToleranceNotMet(
                f"alpha=1 integral panel [{r_lo:.3g}, {r_hi:.3g}] did not converge at x={x}"
            ) from exc
        total += res.value
        quad_err += res.abs_err
        n_evals += res.n_evals
        partials.append(total)
        r_lo = r_hi
        if r_hi > r_star and phi(r_hi) < phi_max - _A1_INT_LOG_CUT:
            # past the peak; e^{phi} decays at least like e^{-x r}, so the
            # remaining mass is under e^{phi(r)}/x; stop once that falls
            # beneath the roundoff floor the result will report anyway
            tail = math.exp(phi(r_hi)) / x
            if tail < 0.01 * 2.2e-16 * max(abs(total), peak_scale) + 1e-300:
                quad_err += tail
                converged = True
                break
    value = total
    if not converged:
        try:
            acc = _quad.accelerate(partials[-24:])
        except AccelerationStalled as exc:
            raise ToleranceNotMet(
                f"alpha=1 integral partial sums neither settled nor accelerated at x={x}"
            ) from exc
        value = acc.value
        quad_err += acc.abs_err
    abs_err = (quad_err + 2.2e-16 * peak_scale) / math.pi
    value = value / math.pi
    if not (abs_err <= 0.5 * abs(value)) or not math.isfinite(value):
        raise ToleranceNotMet(
            f"alpha=1 integral route lost all digits at x={x} "
            f"(value {value:.3e}, abs_err {abs_err:.3e})",
            result=EvalResult(value, abs_err, "alpha1_integral!lost", n_evals),
        )
    return EvalResult(value=value, abs_err=abs_err, method="alpha1_integral", n_evals=n_evals)


def alpha1_smallx(gamma: float, x: float) -> float:
    """Leading x -> 0+ asymptotic of the alpha = 1 density,

        h_1(x) ~ exp(phi*) / sqrt(2 pi phi''),
        phi* = (gamma-1) (Gamma(1-gamma))^{1/(1-gamma)} gamma^{gamma/(1-gamma)}
                   x^{-gamma/(1-gamma)},

    a stretched-exponential suppression with power prefactor
    x^{-(1-gamma/2)/(1-gamma)}.  Total formula; accuracy degrades as x
    grows (use only where the next-order correction is small).
    """
    _check_alpha1_args(gamma, x)
    B = _sp.gamma(1.0 - gamma)
    p_star = (gamma * B / x) ** (1.0 / (1.0 - gamma))
    phi_star = (gamma - 1.0) * B ** (1.0 / (1.0 - gamma)) * gamma ** (
        gamma / (1.0 - gamma)
    ) * x ** (-gamma / (1.0 - gamma))
    phi_dd = B * gamma * (1.0 - gamma) * p_star ** (gamma - 2.0)
    return math.exp(phi_star) / math.sqrt(2.0 * math.pi * phi_dd)


_THIRD = 1.0 / 3.0


def alpha1_rational_density(rg: RationalGamma, x: float) -> float:
    """Airy-family closed forms at the exponents 1/2, 1/3, 2/3:

        h_1(x; 1/2) = x^{-3/2} e^{-pi/(4x)} / 2
        h_1(x; 1/3) = Gamma(2/3) 3^{-1/3} x^{-4/3} Ai(3^{-1/3} Gamma(2/3) x^{-1/3})
        h_1(x; 2/3) = 4 pi e^{-2 Gamma(4/3)^3 / x^2} / (3^{5/6} Gamma(-1/3) x^{7/3})
                        * (3^{2/3} x^{2/3} Ai'(z) - 3 Gamma(4/3) Ai(z)),
                      z = 3^{2/3} Gamma(4/3)^2 x^{-4/3}.
    """
    if x <= 0.0:
        raise DomainError(f"alpha1_rational_density needs x > 0, got {x}")
    g = rg.p / rg.q
    if rg.q == 2:
        return 0.5 * x ** -1.5 * math.exp(-math.pi / (4.0 * x))
    if rg.p == 1:  # gamma = 1/3
        z = 3.0 ** (-_THIRD) * _sp.gamma(2.0 / 3.0) * x ** (-_THIRD)
        return _sp.gamma(2.0 / 3.0) / (3.0 ** _THIRD * x ** (4.0 / 3.0)) * airy_ai(z)
    # gamma = 2/3; Gamma(-1/3) < 0 and the Ai'/Ai combination is negative
    g43 = _sp.gamma(4.0 / 3.0)
    z = 3.0 ** (2.0 / 3.0) * g43 * g43 * x ** (-4.0 / 3.0)
    pref = 4.0 * math.pi * math.exp(-2.0 * g43 ** 3 / (x * x)) / (
        3.0 ** (5.0 / 6.0) * _sp.gamma(-_THIRD) * x ** (7.0 / 3.0)
    )
    return pref * (3.0 ** (2.0 / 3.0) * x ** (2.0 / 3.0) * airy_ai_prime(z) - 3.0 * g43 * airy_ai(z))


def alpha1_density(gamma: float, x: float) -> EvalResult:
    """Best-route alpha = 1 density.

    Exponent 1/2 takes the pure closed form.  Otherwise the series is
    used where its envelope contracts (term ratio at n = 5 below 0.5)
    and its cancellation budget holds; the oscillatory integral covers
    moderate x; and the small-x asymptotic takes over once the integral
    peak exponent exceeds the roundoff budget.
    """
    _check_alpha1_args(gamma, x)
    if gamma == 0.5:
        v = 0.5 * x ** -1.5 * math.exp(-math.pi / (4.0 * x))
        return EvalResult(value=v, abs_err=4e-16 * v, method="closed_rational")
    if _series_envelope_ratio(gamma, x) < 0.5:
        r = _alpha1_series_raw(gamma, x)
        if r.value > 0.0 and r.abs_err <= 1e-9 * r.value:
            return r
    try:
        return alpha1_density_integral(gamma, x)
    except ToleranceNotMet:
        pass
    v = alpha1_smallx(gamma, x)
    # leading saddle correction is O(x^{gamma/(1-gamma)}); report a blunt
    # 10% bound rather than pretend more
    return EvalResult(value=v, abs_err=0.1 * v, method="alpha1_smallx")


def alpha1_mellin(gamma: float, s: complex) -> complex:
    """H_1(s) = Gamma(1-gamma)^{(s-1)/gamma} Gamma((1+gamma-s)/gamma) / Gamma(2-s)."""
    if not (0.0 < gamma < 1.0):
        raise DomainError(f"alpha1_mellin needs gamma in (0, 1), got {gamma}")
    s = complex(s)
    if s.real >= 1.0 + gamma:
        raise DomainError(f"alpha1_mellin requires Re(s) < 1+gamma, got {s}")
    lB = math.lgamma(1.0 - gamma)
    w = (s - 1.0) / gamma * lB + log_gamma((1.0 + gamma - s) / gamma) - log_gamma(2.0 - s)
    return complex(np.exp(w))


def alpha1_density_mb(gamma: float, x: float, cfg: MellinConfig | None = None) -> EvalResult:
    """alpha = 1 density by inverse Mellin transform, through the same
    contour machinery as the general-parameter inversion but with the
    closed-form interpolation

        P_1(t) = Gamma(1-gamma)^t / Gamma(1 - gamma t)

    in place of the hypergeometric product.  Bookends the general
    machinery against the series route.
    """
    _check_alpha1_args(gamma, x)
    cfg = cfg or MellinConfig()
    if not (0.0 < cfg.contour_c < 1.0):
        raise DomainError("alpha1_density_mb requires 0 < contour_c < 1")
    lB = math.lgamma(1.0 - gamma)
    lx = math.log(x)

    def logP1(t):
        return t * lB - log_gamma(1.0 - gamma * t)

    params = Params(gamma=gamma, alpha=0.0)  # carrier only; P is overridden
    r = _mellin._contour_integral(
        params,
        cfg,
        log_x_weight=lambda t: -gamma * t * lx,
        gamma_arg_of_t=lambda t: 1.0 - t,
        logP_of_t=logP1,
    )
    scale = gamma / (math.pi * x)
    return EvalResult(
        value=scale * r.value,
        abs_err=scale * r.abs_err,
        method="alpha1_mellin_barnes",
        n_evals=r.n_evals,
    )


# ---------------------------------------------------------------------------
# Gumbel domain

def gumbel_density(alpha: float, x: float) -> float:
    """Fixed-point density in the Gumbel domain,

        (1-alpha)/Gamma(1/(1-alpha)) exp(-x - e^{-(1-alpha)x}),

    supported on the whole real line; alpha = 0 is the standard Gumbel."""
    if not (0.0 <= alpha < 1.0):
        raise DomainError(f"gumbel_density needs alpha in [0, 1), got {alpha}")
    if not math.isfinite(x):
        raise DomainError("gumbel_density needs finite x")
    om = 1.0 - alpha
    inner = -om * x
    # e^{-(1-alpha)x} overflows for very negative x; the density is then 0
    if inner > 700.0:
        return 0.0
    return om / _sp.gamma(1.0 / om) * math.exp(-x - math.exp(inner))


# ---------------------------------------------------------------------------
# large-exponent family

def _large_gamma_check(params: Params, what: str) -> None:
    params.require_alpha_lt1(what)
    if params.gamma <= params.alpha:
        raise DomainError(
            f"{what} needs gamma > alpha, got gamma={params.gamma}, alpha={params.alpha}"
        )


def large_gamma_density(params: Params, x: float) -> float:
    """Elementary large-exponent density

        h(x) = gamma (1-alpha)^{-beta} / Gamma(q) x^{-1-beta}
                   exp(-(1-alpha)^{-gamma} x^{-gamma}),

    beta = (gamma-alpha)/(1-alpha), q = beta/gamma; exactly normalized."""
    _large_gamma_check(params, "large_gamma_density")
    if x <= 0.0:
        raise DomainError(f"large_gamma_density needs x > 0, got {x}")
    g, a = params.gamma, params.alpha
    beta = (g - a) / (1.0 - a)
    q = beta / g
    c = (1.0 - a) ** (-g)
    return g * (1.0 - a) ** (-beta) / _sp.gamma(q) * x ** (-1.0 - beta) * math.exp(
        -c * x ** (-g)
    )


def large_gamma_mellin(params: Params, s: complex) -> complex:
    """Mellin transform of the large-exponent density:

        H(s) = (1-alpha)^{1-s} Gamma((1+beta-s)/gamma) / Gamma(beta/gamma)."""
    _large_gamma_check(params, "large_gamma_mellin")
    g, a = params.gamma, params.alpha
    beta = (g - a) / (1.0 - a)
    s = complex(s)
    if s.real >= 1.0 + beta:
        raise DomainError(f"large_gamma_mellin requires Re(s) < 1+beta, got {s}")
    w = (1.0 - s) * math.log1p(-a) + log_gamma((1.0 + beta - s) / g) - log_gamma(beta / g)
    return complex(np.exp(w))


def large_gamma_generating(params: Params, x: float) -> float:
    """g(x) = 1F1(1/(1-alpha); 1; -(1-alpha)^gamma x)."""
    _large_gamma_check(params, "large_gamma_generating")
    if x < 0.0:
        raise DomainError(f"large_gamma_generating needs x >= 0, got {x}")
    a = params.alpha
    return float(_sp.hyp1f1(1.0 / (1.0 - a), 1.0, -((1.0 - a) ** params.gamma) * x))


def large_gamma_laplace(params: Params, z: float) -> float:
    """L(z) = z^{-1} (1 + (1-alpha)^gamma z^{-1})^{-1/(1-alpha)}."""
    _large_gamma_check(params, "large_gamma_laplace")
    if z <= 0.0:
        raise DomainError(f"large_gamma_laplace needs z > 0, got {z}")
    a = params.alpha
    return (1.0 / z) * (1.0 + (1.0 - a) ** params.gamma / z) ** (-1.0 / (1.0 - a))
