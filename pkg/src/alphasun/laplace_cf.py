"""Laplace transform of the generating function.

Two routes: the alternating inverse-power series about z = infinity,
and its Euler recasting as an M-continued fraction

    1/L(z) = z + K_{m>=1} (F_{m-1} z) / (F_m z - 1),

whose convergents (computed by the forward three-term recurrence, where
the partial denominators collapse to B_n = 1) reproduce the partial sums
exactly.  Inside the series radius |z| > (1-alpha)^gamma both routes
converge termwise; below it the forward convergents diverge and the
evaluator switches to epsilon extrapolation of the stored convergents,
reporting a value only when two extrapolations of different depth agree.
No claim of analytic continuation is made beyond that empirical check.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.special import gammaln

from . import quad as _quad
from .errors import (
    AccelerationStalled,
    DivergentRegime,
    DomainError,
    NonConvergence,
    ZeroDenominator,
)
from .specfun import hyp2f1_row
from .types import CFState, EvalResult, MellinConfig, Params, QuadConfig

__all__ = ["laplace_series", "laplace_cf", "laplace_vs_generating", "series_radius"]

_DEPTH_CAP = 100_000
_RESCALE_AT = 1e150
_EPS_STORE = 220
_EPS_OVERFLOW = 1e100
_BLOCK = 64


def series_radius(params: Params) -> float:
    """(1-alpha)^gamma, the divergence boundary of the inverse-power
    expansion; zero at alpha = 1 (the transform is then entire in 1/z)."""
    if params.alpha == 1.0:
        return 0.0
    return (1.0 - params.alpha) ** params.gamma


def _log_F_block(params: Params, j0: int, n: int) -> np.ndarray:
    """log F_j for j = j0 .. j0+n-1, F_j = 2F1(gamma, j gamma; 1+j gamma; alpha).

    At alpha = 1 the hypergeometric collapses to a Gamma ratio, kept in
    log space so the ladder never overflows.
    """
    g, a = params.gamma, params.alpha
    j = np.arange(j0, j0 + n)
    if a == 0.0:
        return np.zeros(n)
    if a == 1.0:
        out = math.lgamma(1.0 - g) + gammaln(1.0 + j * g) - gammaln(1.0 + (j - 1) * g)
    else:
        out = np.log(hyp2f1_row(params, (j * g).astype(complex)).real)
    out[j == 0] = 0.0  # F_0 = 1 exactly
    return out


def laplace_series(params: Params, z: float, n_max: int = 500) -> EvalResult:
    """L(z) = sum_l (-1)^l z^{-l-1} / prod_{j<=l} F_j for z above the
    series radius, with the first omitted term as the error bound."""
    if z <= 0.0:
        raise DomainError(f"laplace_series needs z > 0, got {z}")
    if params.alpha == 1.0:
        params.require_gamma_lt1("the alpha = 1 Laplace ladder")
    radius = series_radius(params)
    if z <= radius:
        raise DivergentRegime(
            f"series diverges for z <= (1-alpha)^gamma = {radius:g}, got z={z}",
            diagnostics={"radius": radius},
        )
    lz = math.log(z)
    total = 0.0
    log_prod = 0.0
    logF = _log_F_block(params, 0, _BLOCK)
    k0 = 0
    term = 0.0
    for l in range(n_max):
        if l - k0 >= len(logF):
            k0 += len(logF)
            logF = _log_F_block(params, k0, _BLOCK)
        log_prod += logF[l - k0]
        term = (-1.0) ** l * math.exp(-(l + 1) * lz - log_prod)
        new = total + term
        if new == total and l >= 2:
            # converged to roundoff; the bound is the next (omitted) term
            break
        total = new
    else:
        raise NonConvergence(
            f"series did not settle within {n_max} terms at z={z}",
            diagnostics={"last_term": term, "radius": radius},
        )
    nxt = math.exp(-(l + 2) * math.log(z) - log_prod - float(_log_F_block(params, l + 1, 1)[0]))
    return EvalResult(
        value=total,
        abs_err=abs(nxt) + 2.2e-16 * abs(total) * (l + 1),
        method="laplace_series",
        terms_used=l + 1,
    )


def _convergents(params: Params, z: float, depth: int):
    """Forward-recurrence convergents of the continued fraction, yielded
    as CFState.  With partial coefficients a_1 = 1, b_1 = 1 and, for
    m >= 1, a_{m+1} = E_m w, b_{m+1} = 1 - E_m w (E_m = 1/F_m, w = 1/z),
    the denominators satisfy B_n = 1 and the convergents are exactly the
    partial sums of the Euler series; the recurrence form is kept, with
    periodic rescaling, so the equivalence stays a checked fact rather
    than an assumption.
    """
    w = 1.0 / z
    A_prev, A = 1.0, 0.0  # A_{-1}, A_0
    B_prev, B = 0.0, 1.0
    c_prev = math.inf
    logF = _log_F_block(params, 0, _BLOCK)
    k0 = 0
    for n in range(1, depth + 1):
        if n == 1:
            a_n, b_n = 1.0, 1.0
        else:
            m = n - 1  # a_{m+1} = E_m w with m = n-1
            if m - k0 >= len(logF):
                k0 += len(logF)
                logF = _log_F_block(params, k0, _BLOCK)
            Ew = w * math.exp(-logF[m - k0])
            a_n, b_n = Ew, 1.0 - Ew
        A_prev, A = A, b_n * A + a_n * A_prev
        B_prev, B = B, b_n * B + a_n * B_prev
        if B == 0.0:
            B = 1e-300  # standard modified-recurrence sentinel
        if abs(A) > _RESCALE_AT or abs(B) > _RESCALE_AT:
            s = max(abs(A), abs(B))
            A, A_prev, B, B_prev = A / s, A_prev / s, B / s, B_prev / s
        c = A / B
        delta = abs(c - c_prev) / max(abs(c), 1e-300)
        yield CFState(depth=n, convergent=c, delta=delta)
        c_prev = c


def laplace_cf(params: Params, z: float, tol: float = 1e-12) -> EvalResult:
    """L(z) through the continued fraction.  Above the series radius the
    convergents settle termwise (delta below tol twice running); at or
    below it they oscillate or diverge, and the value is the epsilon
    extrapolation of the stored convergents, cross-checked at two depths.
    """
    if z <= 0.0:
        raise DomainError(f"laplace_cf needs z > 0, got {z}")
    if not (0.0 <= params.alpha <= 1.0):
        raise DomainError(f"laplace_cf needs alpha in [0, 1], got {params.alpha}")
    if params.alpha == 1.0:
        params.require_gamma_lt1("the alpha = 1 Laplace ladder")
    w = 1.0 / z
    direct = z > series_radius(params) * (1.0 + 1e-12)
    stored: list[float] = []
    hits = 0
    state = None
    for state in _convergents(params, z, _DEPTH_CAP):
        if len(stored) < _EPS_STORE and abs(state.convergent) < _EPS_OVERFLOW:
            stored.append(state.convergent)
        if direct:
            hits = hits + 1 if state.delta < tol else 0
            if hits >= 2 and state.depth >= 4:
                return EvalResult(
                    value=w * state.convergent,
                    abs_err=w * state.delta * abs(state.convergent),
                    method="laplace_cf",
                    terms_used=state.depth,
                )
        elif len(stored) >= _EPS_STORE or abs(state.convergent) >= _EPS_OVERFLOW:
            break
    if direct:
        raise NonConvergence(
            f"continued fraction did not reach tol={tol:g} within "
            f"{_DEPTH_CAP} levels at z={z}",
            diagnostics={"last": state.convergent if state else None},
        )
    # Below the radius the convergents grow geometrically, and deep Wynn
    # tables on huge entries lose the small limit to cancellation, so the
    # extrapolation runs on a ladder of short prefixes.  A value is
    # accepted only when two adjacent depths that each carry a clean
    # internal error estimate agree; the larger table is otherwise pure
    # roundoff and must not vote.
    last = None
    for n_pref in (8, 12, 17, 24, 34, 48, 68, 96, 136, 190, _EPS_STORE):
        if n_pref > len(stored):
            break
        try:
            cand = _quad.accelerate(stored[:n_pref])
        except AccelerationStalled:
            continue
        if cand.abs_err > 0.05 * abs(cand.value):
            continue
        if last is not None:
            drift = abs(cand.value - last.value)
            if drift <= 10.0 * max(last.abs_err, cand.abs_err, tol * abs(cand.value)):
                best = cand if cand.abs_err <= last.abs_err else last
                if best.value == 0.0:
                    raise ZeroDenominator(f"extrapolated transform vanished at z={z}")
                return EvalResult(
                    value=w * best.value,
                    abs_err=w * max(best.abs_err, drift),
                    method="laplace_cf_epsilon",
                    terms_used=best.terms_used,
                )
        last = cand
    raise NonConvergence(
        f"convergents diverge at z={z} below the series radius and epsilon "
        "extrapolation did not stabilize across depths",
        diagnostics={"stored": len(stored), "last": last.value if last else None},
    )


def laplace_vs_generating(params: Params, z: float, cfg: MellinConfig | None = None) -> float:
    """|L(z) - int_0^inf e^{-zx} g(x) dx|, the transform pair checked by
    direct quadrature against the generating-function evaluator."""
    from . import mellin as _mellin

    if z <= 0.0:
        raise DomainError(f"laplace_vs_generating needs z > 0, got {z}")
    params.require_alpha_lt1("the generating-function reference")
    L = laplace_cf(params, z).value
    qcfg = QuadConfig(abs_tol=1e-12, rel_tol=1e-10, max_subdivisions=200)
    if params.alpha == 0.0:
        r = _quad.integrate_semi_infinite(lambda x: math.exp(-z * x) * math.exp(-x), 0.0, qcfg)
        return abs(L - r.value)
    span = max(50.0 / z, 100.0)
    grid = _mellin.ContourGrid(
        params,
        cfg or MellinConfig(product_J=2048),
        kind="generating",
        log_x_max=math.log(span),
    )
    x_min = math.exp(-grid.log_x_max)

    def g_of(x: float) -> float:
        if x <= x_min:
            return _mellin.generating(params, x).value if x > 0.0 else 1.0
        return float(grid.values(np.asarray([x]))[0])

    # past the cut the kernel alone bounds the remainder: z*span >= 50
    # makes it e^{-50}/z, far below the 1e-5 contract
    r = _quad.integrate_finite(lambda x: math.exp(-z * x) * g_of(x), 0.0, span, qcfg)
    return abs(L - r.value)
