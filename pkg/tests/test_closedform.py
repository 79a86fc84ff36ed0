"""Boundary laws (alpha = 0, alpha = 1) and the large-exponent family."""

import math

import numpy as np
import pytest
from scipy.integrate import quad as spquad

from alphasun import closedform
from alphasun.errors import DomainError
from alphasun.types import Params, RationalGamma


def moment_alpha1(gamma, s):
    """Mellin moment of the alpha = 1 density by quadrature.

    Integrated in u = 1/x: the algebraic right tail becomes an
    integrable endpoint singularity u^{gamma-s} at u = 0 and the x -> 0
    essential decay becomes a stretched-exponential right tail.
    """
    def f(u):
        return u ** (-1.0 - s) * closedform.alpha1_density(gamma, 1.0 / u).value

    head, _ = spquad(f, 0.0, 1.0, limit=200)
    tail, _ = spquad(f, 1.0, np.inf, limit=200)
    return head + tail


class TestFrechet:
    def test_density_normalizes(self):
        # in u = 1/x the integrand is gamma u^{gamma-1} e^{-u^gamma}, an
        # exact derivative; the x-space tail x^{-1-gamma} is too slow for
        # direct semi-infinite quadrature
        g = 0.5
        head, _ = spquad(lambda u: u ** -2 * closedform.frechet_density(g, 1.0 / u), 0, 1)
        tail, _ = spquad(lambda u: u ** -2 * closedform.frechet_density(g, 1.0 / u), 1, np.inf)
        assert abs(head + tail - 1.0) < 1e-9

    def test_density_value(self):
        # gamma = 1/2 at x = 1: (1/2) e^{-1}
        assert abs(closedform.frechet_density(0.5, 1.0) - 0.5 * math.exp(-1.0)) < 1e-15

    def test_mellin_matches_moments(self):
        g = 0.75
        for s in (0.5, 1.0, 1.2):
            want = 0.0
            for lo, hi in ((0.0, 1.0), (1.0, np.inf)):
                part, _ = spquad(
                    lambda u: u ** (-1.0 - s) * closedform.frechet_density(g, 1.0 / u),
                    lo,
                    hi,
                )
                want += part
            assert abs(closedform.frechet_mellin(g, s) - want) < 1e-8

    def test_mellin_normalization_point(self):
        for g in (0.25, 0.5, 2.0):
            assert abs(closedform.frechet_mellin(g, 1.0) - 1.0) < 1e-14

    def test_mode_formula(self):
        g = 0.5
        x_max, h_max = closedform.mode_alpha0(g)
        # numeric argmax oracle on a fine grid
        xs = np.linspace(0.01, 1.0, 20000)
        hs = np.array([closedform.frechet_density(g, x) for x in xs])
        k = int(np.argmax(hs))
        assert abs(xs[k] - x_max) < 1e-4
        assert abs(hs[k] - h_max) < 1e-6
        # stationarity of the claimed maximizer
        eps = 1e-6
        dh = (
            closedform.frechet_density(g, x_max + eps)
            - closedform.frechet_density(g, x_max - eps)
        ) / (2 * eps)
        assert abs(dh) < 1e-6


class TestAlpha1Routes:
    # left endpoints chosen clear of the oscillatory route's roundoff
    # wall: for gamma > 1/2 the integrand peaks at e^{+phimax} while the
    # answer is e^{-|phistar|}, so small x loses all digits and raises
    CASES = {
        0.25: (0.3, 1.0, 3.0, 8.0),
        0.4: (0.3, 1.0, 3.0, 8.0),
        0.5: (0.3, 1.0, 3.0, 8.0),
        0.6: (0.3, 1.0, 3.0, 8.0),
        0.75: (1.0, 3.0, 8.0),
    }

    @pytest.mark.parametrize("gamma", sorted(CASES))
    def test_series_vs_integral(self, gamma):
        for x in self.CASES[gamma]:
            s = closedform.alpha1_density_series(gamma, x)
            i = closedform.alpha1_density_integral(gamma, x)
            assert abs(s.value - i.value) < 1e-9 * max(abs(s.value), 1e-10)

    def test_rational_gamma_half(self):
        rg = RationalGamma(1, 2)
        for x in (0.2, 1.0, 2.5):
            got = closedform.alpha1_rational_density(rg, x)
            want = 0.5 * x ** -1.5 * math.exp(-math.pi / (4.0 * x))
            assert abs(got - want) < 1e-15 * want
            series = closedform.alpha1_density_series(0.5, x).value
            assert abs(got - series) < 1e-9 * want

    def test_rational_thirds(self):
        for p, q in ((1, 3), (2, 3)):
            rg = RationalGamma(p, q)
            g = p / q
            for x in (0.6, 1.5, 4.0):
                got = closedform.alpha1_rational_density(rg, x)
                want = closedform.alpha1_density_series(g, x).value
                assert abs(got - want) < 1e-9 * max(want, 1e-12)

    def test_gamma_half_explicit_value(self):
        # h_1(1; 1/2) = e^{-pi/4} / 2
        want = 0.5 * math.exp(-math.pi / 4.0)
        assert abs(closedform.alpha1_density(0.5, 1.0).value - want) < 1e-12

    def test_router_unimodal(self):
        # the dispatcher hands off series -> integral -> small-x along
        # this grid; seams must not break monotone rise and fall
        g = 0.63
        xs = np.geomspace(0.05, 30.0, 120)
        vals = np.array([closedform.alpha1_density(g, x).value for x in xs])
        assert np.all(vals > 0.0)
        k = int(np.argmax(vals))
        tol = 1e-9 * vals[k]
        assert 0 < k < len(vals) - 1
        assert np.all(np.diff(vals[: k + 1]) >= -tol)
        assert np.all(np.diff(vals[k:]) <= tol)

    def test_normalization(self):
        assert abs(moment_alpha1(0.4, 1.0) - 1.0) < 1e-7

    def test_smallx_is_exact_at_gamma_half(self):
        # the saddle-point formula closes at gamma = 1/2 (below
        # x ~ 1e-3 both sides underflow to zero together)
        for x in (1e-2, 3e-3):
            lead = closedform.alpha1_smallx(0.5, x)
            full = closedform.alpha1_density(0.5, x).value
            assert abs(lead - full) < 1e-12 * full

    def test_smallx_converges(self):
        g = 0.4
        rel = []
        for x in (3e-3, 1e-3, 3e-4):
            lead = closedform.alpha1_smallx(g, x)
            full = closedform.alpha1_density(g, x).value
            rel.append(abs(lead - full) / full)
        assert rel[0] < 0.1
        assert rel[2] < rel[0]

    def test_mellin_moments(self):
        g = 0.5
        for s in (0.6, 1.0, 1.3):
            got = closedform.alpha1_mellin(g, s)
            assert abs(got - moment_alpha1(g, s)) < 1e-6 * max(1.0, abs(got))

    def test_mellin_normalization_point(self):
        for g in (0.25, 0.5, 0.9):
            assert abs(closedform.alpha1_mellin(g, 1.0) - 1.0) < 1e-14

    def test_mb_route_matches_hybrid(self):
        g = 0.5
        for x in (0.3, 1.0, 4.0):
            mb = closedform.alpha1_density_mb(g, x)
            hy = closedform.alpha1_density(g, x)
            assert abs(mb.value - hy.value) < 1e-6 * max(hy.value, 1e-9)

    def test_domain_guards(self):
        with pytest.raises(DomainError):
            closedform.alpha1_density(1.0, 1.0)
        with pytest.raises(DomainError):
            closedform.alpha1_density(0.5, -1.0)
        with pytest.raises(DomainError):
            closedform.alpha1_mellin(0.5, 1.6)
        with pytest.raises(DomainError):
            closedform.alpha1_rational_density(RationalGamma(1, 3), 0.0)


class TestGumbel:
    @pytest.mark.parametrize("alpha", [0.0, 0.5, 0.9])
    def test_normalizes_over_real_line(self, alpha):
        val, _ = spquad(lambda x: closedform.gumbel_density(alpha, x), -np.inf, np.inf)
        assert abs(val - 1.0) < 1e-9

    def test_alpha0_is_standard_gumbel(self):
        for x in (-1.0, 0.0, 2.0):
            want = math.exp(-x - math.exp(-x))
            assert abs(closedform.gumbel_density(0.0, x) - want) < 1e-14

    def test_rejects_alpha_one(self):
        with pytest.raises(DomainError):
            closedform.gumbel_density(1.0, 0.0)


class TestLargeGamma:
    P = Params(gamma=4.0, alpha=0.5)

    def test_density_normalizes(self):
        val, _ = spquad(lambda x: closedform.large_gamma_density(self.P, x), 0, np.inf)
        assert abs(val - 1.0) < 1e-9

    def test_mellin_matches_quadrature(self):
        for s in (0.5, 1.0, 2.0):
            want, _ = spquad(
                lambda x: x ** (s - 1.0) * closedform.large_gamma_density(self.P, x),
                0,
                np.inf,
            )
            got = closedform.large_gamma_mellin(self.P, s)
            assert abs(got - want) < 1e-7 * max(1.0, abs(want))

    def test_mellin_normalization_point(self):
        assert abs(closedform.large_gamma_mellin(self.P, 1.0) - 1.0) < 1e-12

    def test_laplace_matches_generating_quadrature(self):
        z = 1.5
        want, _ = spquad(
            lambda t: math.exp(-z * t) * closedform.large_gamma_generating(self.P, t),
            0,
            np.inf,
            limit=200,
        )
        got = closedform.large_gamma_laplace(self.P, z)
        assert abs(got - want) < 1e-8

    def test_generating_at_zero(self):
        assert closedform.large_gamma_generating(self.P, 0.0) == 1.0

    def test_requires_gamma_above_alpha(self):
        with pytest.raises(DomainError):
            closedform.large_gamma_density(Params(gamma=0.3, alpha=0.5), 1.0)
        with pytest.raises(DomainError):
            closedform.large_gamma_laplace(Params(gamma=0.3, alpha=0.5), 1.0)

    def test_tail_exponent(self):
        # local log-log slope approaches -(1+beta)
        g, a = self.P.gamma, self.P.alpha
        beta = (g - a) / (1.0 - a)
        x1, x2 = 200.0, 400.0
        slope = math.log(
            closedform.large_gamma_density(self.P, x2)
            / closedform.large_gamma_density(self.P, x1)
        ) / math.log(x2 / x1)
        assert abs(slope + 1.0 + beta) < 1e-3
