"""Scalar special functions used throughout the package.

The workhorse is the one-free-parameter Gauss hypergeometric family
2F1(gamma, b; 1+b; alpha), evaluated through its partial-fraction series

    2F1(gamma, b; 1+b; alpha) = sum_k c_k * b/(b+k),   c_k = (gamma)_k alpha^k / k!,

which converges geometrically (ratio alpha) for every complex b away from
the poles b = -1, -2, ...  Rewriting the sum as

    F(b) = F_inf - sum_{k>=1} k c_k / (b+k),           F_inf = (1-alpha)^{-gamma},

makes the truncation tail monotone and easy to bound, and exposes the
simple poles at b = -k with residue -k c_k.  An independent quadrature
route through the integral representation

    F(b) = (1-alpha)^{-gamma} - alpha gamma int_0^1 t^b (1-alpha t)^{-gamma-1} dt

serves as a cross-check and as a fallback when alpha is so close to 1
that the series would need more than 10^4 terms.
"""

from __future__ import annotations

import math

import numpy as np
import scipy.special as _sp
from scipy.integrate import quad as _spquad

from .errors import ConvergenceError, DomainError, PoleError
from .types import Params

__all__ = [
    "log_gamma",
    "hyp2f1_b_bplus1",
    "hyp2f1_integral_route",
    "F_j",
    "bessel_j0",
    "airy_ai",
    "airy_ai_prime",
    "wright_bessel",
    "mittag_leffler",
]

# Series truncation targets a tail below this multiple of F_inf; the
# partial-fraction terms k*c_k/(b+k) are then below roundoff of the sum.
_SERIES_TAIL_REL = 1e-17
_SERIES_MAX_TERMS = 10_000
_POLE_GUARD = 1e-8


def log_gamma(z: complex) -> complex:
    """Principal branch of log Gamma(z).

    Raises PoleError at the non-positive integers.
    """
    zc = complex(z)
    if zc.imag == 0.0 and zc.real <= 0.0 and zc.real == round(zc.real):
        raise PoleError(f"log_gamma pole at z={z}")
    return complex(_sp.loggamma(zc))


def _ladder_coeffs(gamma: float, alpha: float) -> np.ndarray:
    """Coefficients c_k = (gamma)_k alpha^k / k! until the tail bound
    sum_{m>k} m c_m <= k c_k r/(1-r), r = alpha (gamma+k)/k, drops below
    the truncation target."""
    if alpha == 0.0:
        return np.array([1.0])
    target = _SERIES_TAIL_REL * (1.0 - alpha) ** (-gamma)
    c = [1.0]
    k = 1
    while True:
        c.append(c[-1] * alpha * (gamma + k - 1.0) / k)
        if k >= 8:
            r = alpha * (gamma + k) / k
            if r < 1.0 and c[-1] * (k + 1) * r / (1.0 - r) < target:
                break
        if k >= _SERIES_MAX_TERMS:
            raise ConvergenceError(
                f"2F1 series needs more than {_SERIES_MAX_TERMS} terms at alpha={alpha}",
                diagnostics={"gamma": gamma, "alpha": alpha, "terms": k},
            )
        k += 1
    return np.asarray(c)


# Coefficient tables are immutable once built; cache by parameter pair.
_coeff_cache: dict[tuple[float, float], np.ndarray] = {}


def ladder_coeffs(gamma: float, alpha: float) -> np.ndarray:
    key = (gamma, alpha)
    tbl = _coeff_cache.get(key)
    if tbl is None:
        tbl = _ladder_coeffs(gamma, alpha)
        _coeff_cache[key] = tbl
    return tbl


def _check_params(params: Params, who: str) -> None:
    if not (0.0 <= params.alpha < 1.0):
        raise DomainError(f"{who} requires alpha in [0, 1), got {params.alpha}")


def hyp2f1_b_bplus1(params: Params, b: complex) -> complex:
    """2F1(gamma, b; 1+b; alpha) for complex b off the poles b = -1, -2, ...

    For real b >= 0 the value is real and lies in [1, (1-alpha)^{-gamma}].
    Series truncation keeps the tail below 1e-17 * (1-alpha)^{-gamma}.
    """
    _check_params(params, "hyp2f1_b_bplus1")
    if params.alpha == 0.0:
        return 1.0 + 0.0j
    bc = complex(b)
    if bc.imag == 0.0 and bc.real < 0.0:
        near = round(bc.real)
        if near <= -1 and abs(bc.real - near) < _POLE_GUARD:
            raise PoleError(f"2F1(gamma, b; 1+b; alpha) pole at b={b}")
    try:
        c = ladder_coeffs(params.gamma, params.alpha)
    except ConvergenceError:
        return hyp2f1_integral_route(params, b)
    k = np.arange(1, len(c))
    finf = (1.0 - params.alpha) ** (-params.gamma)
    val = finf - np.sum(k * c[1:] / (bc + k))
    if bc.imag == 0.0:
        return complex(val.real)
    return complex(val)


def hyp2f1_integral_route(params: Params, b: complex, rel_tol: float = 1e-12) -> complex:
    """Quadrature route for the same function via the integral
    representation; slower but independent of the series."""
    _check_params(params, "hyp2f1_integral_route")
    g, a = params.gamma, params.alpha
    if a == 0.0:
        return 1.0 + 0.0j
    bc = complex(b)
    if bc.real <= -1.0 and bc.imag == 0.0:
        raise DomainError("integral route needs Re(b) > -1")

    def f_re(t):
        return (t ** bc * (1.0 - a * t) ** (-g - 1.0)).real

    def f_im(t):
        return (t ** bc * (1.0 - a * t) ** (-g - 1.0)).imag

    vr, _ = _spquad(f_re, 0.0, 1.0, epsabs=1e-14, epsrel=rel_tol, limit=400)
    if bc.imag == 0.0:
        return complex((1.0 - a) ** (-g) - a * g * vr)
    vi, _ = _spquad(f_im, 0.0, 1.0, epsabs=1e-14, epsrel=rel_tol, limit=400)
    return (1.0 - a) ** (-g) - a * g * complex(vr, vi)


def hyp2f1_row(params: Params, b: np.ndarray) -> np.ndarray:
    """Vectorized kernel over an array of b values (no pole checks).

    Used by the product engine, which guards its own pole lattice.
    """
    if params.alpha == 0.0:
        return np.ones(np.shape(b), dtype=complex)
    c = ladder_coeffs(params.gamma, params.alpha)
    k = np.arange(1, len(c))
    finf = (1.0 - params.alpha) ** (-params.gamma)
    barr = np.asarray(b, dtype=complex)
    out = np.empty(barr.shape, dtype=complex)
    # chunk the outer product so the (n_b, n_k) matrix stays cache-sized
    flat = barr.reshape(-1)
    outf = out.reshape(-1)
    step = max(1, (1 << 21) // max(len(k), 1))
    w = k * c[1:]
    for i in range(0, len(flat), step):
        blk = flat[i : i + step, None]
        outf[i : i + step] = finf - np.sum(w / (blk + k), axis=1)
    return out


def F_j(params: Params, j: int) -> float:
    """F_j = 2F1(gamma, j*gamma; 1+j*gamma; alpha), j = 0, 1, 2, ...

    Monotone increasing in j with limit (1-alpha)^{-gamma}.
    """
    if j < 0 or j != int(j):
        raise DomainError(f"F_j needs a non-negative integer j, got {j}")
    if j == 0:
        return 1.0
    return hyp2f1_b_bplus1(params, j * params.gamma).real


def bessel_j0(x: float) -> float:
    """Bessel function of the first kind, order zero."""
    return float(_sp.j0(x))


def airy_ai(x: float) -> float:
    return float(_sp.airy(x)[0])


def airy_ai_prime(x: float) -> float:
    return float(_sp.airy(x)[1])


# ---------------------------------------------------------------------------
# Wright-Bessel function phi(gamma, 1; -z)

_WRIGHT_NMAX = 600
# accept the alternating series only while cancellation leaves this many
# digits: estimated roundoff 1e-15 * max|term| must stay below
# 1e-13 * max(|value|, floor)
_WRIGHT_CANCEL_TOL = 1e-13
_WRIGHT_FLOOR = 1e-8
_EXP_SAFE = 700.0


def _wright_series(gamma: float, z: float) -> tuple[float, float]:
    """Alternating series for phi(gamma, 1; -z), z >= 0.

    Returns (value, abs_err) where abs_err tracks both cancellation
    roundoff and the final term.
    """
    if z == 0.0:
        return 1.0, 0.0
    lz = math.log(z)
    n = np.arange(_WRIGHT_NMAX)
    lt = n * lz - _sp.gammaln(n + 1) - _sp.gammaln(1.0 + n * gamma)
    m = float(lt.max())
    if m > _EXP_SAFE - 40.0:
        return math.nan, math.inf
    terms = np.exp(lt)
    val = float(np.sum(terms * np.where(n % 2 == 0, 1.0, -1.0)))
    # roundoff from summing terms of peak size exp(m), plus truncation
    err = 1e-15 * math.exp(m) + float(terms[-1])
    return val, err


def _wright_mb(gamma: float, z: float) -> float:
    """Mellin-Barnes route: phi(gamma, 1; -z) equals the contour integral
    (1/pi) Re int_0^inf z^{-(c+iy)} Gamma(c+iy) / Gamma(1 - gamma(c+iy)) dy
    at c = 1/2, which converges for all z > 0."""
    lz = math.log(z)
    c = 0.5

    def f(y):
        t = complex(c, y)
        w = -t * lz + _sp.loggamma(t) - _sp.loggamma(1.0 - gamma * t)
        return math.exp(w.real) * math.cos(w.imag)

    v, _ = _spquad(f, 0.0, np.inf, epsabs=1e-14, epsrel=1e-12, limit=400)
    return v / math.pi


def wright_bessel(gamma: float, z: float) -> float:
    """phi(gamma, 1; -z) = sum_n (-z)^n / (n! Gamma(1 + n*gamma)).

    For z < 0 (positive series argument) the terms are all positive and
    the sum is returned unless it overflows, in which case OverflowError
    is raised.  For z >= 0 the alternating series is used while its
    cancellation error is negligible, otherwise the Mellin-Barnes
    integral takes over.
    """
    if not (0.0 < gamma < 1.0):
        raise DomainError(f"wright_bessel requires gamma in (0, 1), got {gamma}")
    if not math.isfinite(z):
        raise DomainError("wright_bessel needs finite z")
    if z < 0.0:
        w = -z
        n = np.arange(_WRIGHT_NMAX)
        lt = n * math.log(w) - _sp.gammaln(n + 1) - _sp.gammaln(1.0 + n * gamma)
        if float(lt.max()) > _EXP_SAFE:
            raise OverflowError(f"wright_bessel argument z={z} overflows")
        return float(np.sum(np.exp(lt)))
    val, err = _wright_series(gamma, z)
    if math.isfinite(val) and err <= _WRIGHT_CANCEL_TOL * max(abs(val), _WRIGHT_FLOOR):
        return val
    return _wright_mb(gamma, z)


def wright_bessel_row(gamma: float, z: np.ndarray) -> np.ndarray:
    """Vectorized wright_bessel over non-negative z."""
    zarr = np.asarray(z, dtype=float)
    out = np.empty(zarr.shape, dtype=float)
    for i, zi in np.ndenumerate(zarr):
        out[i] = wright_bessel(gamma, float(zi))
    return out


# ---------------------------------------------------------------------------
# Mittag-Leffler function E_gamma(z) for real z

_ML_SERIES_RADIUS = 3.0


def _ml_series(gamma: float, z: float) -> tuple[float, float]:
    tot = 0.0
    tmax = 0.0
    term = 1.0
    n = 0
    while n < 500:
        if n * gamma > 170.0:
            term = 0.0
        else:
            term = z ** n / _sp.gamma(1.0 + n * gamma)
        tot += term
        tmax = max(tmax, abs(term))
        if n > 4 and abs(term) < 1e-18 * max(abs(tot), 1.0):
            break
        n += 1
    return tot, 1e-15 * tmax + abs(term)


def _ml_asymptotic_neg(gamma: float, z: float) -> float:
    """-sum_{k>=1} z^{-k} / Gamma(1 - gamma k) for z << -1, truncated at
    the smallest term; terms with 1/Gamma at a non-positive integer vanish."""
    tot = 0.0
    prev = math.inf
    for k in range(1, 120):
        gg = 1.0 - gamma * k
        if gg <= 0.0 and abs(gg - round(gg)) < 1e-12:
            continue
        term = -1.0 / (z ** k * _sp.gamma(gg))
        if abs(term) > prev:
            break
        tot += term
        prev = abs(term)
    return tot


def mittag_leffler(gamma: float, z: float) -> float:
    """E_gamma(z) = sum_n z^n / Gamma(1 + n*gamma) for real z.

    gamma = 1 is exp; gamma = 1/2 uses the scaled-erfc identity
    E_{1/2}(z) = e^{z^2} erfc(-z); otherwise the direct series covers
    |z| <= 3 and the algebraic asymptotic series covers z <= -3.
    Large positive z outside these branches is not implemented.
    """
    if not (0.0 < gamma <= 1.0):
        raise DomainError(f"mittag_leffler requires gamma in (0, 1], got {gamma}")
    if z == 0.0:
        return 1.0
    if gamma == 1.0:
        return math.exp(z)
    if gamma == 0.5:
        # e^{z^2} erfc(-z) = erfcx(-z), stable for either sign
        return float(_sp.erfcx(-z))
    if abs(z) <= _ML_SERIES_RADIUS:
        val, err = _ml_series(gamma, z)
        if err > 1e-10 * max(abs(val), 1e-10):
            raise ConvergenceError(
                f"Mittag-Leffler series lost accuracy at gamma={gamma}, z={z}",
                diagnostics={"abs_err": err},
            )
        return val
    if z < 0.0:
        return _ml_asymptotic_neg(gamma, z)
    raise ConvergenceError(
        f"mittag_leffler not implemented for z={z} > {_ML_SERIES_RADIUS} at gamma={gamma}"
    )
