"""Laplace transform: series, continued fraction, and their seams."""

import math

import pytest
from scipy.special import erfcx

from alphasun import closedform, laplace_cf, specfun
from alphasun.errors import DivergentRegime, DomainError
from alphasun.types import Params


class TestSeriesRadius:
    def test_values(self):
        assert laplace_cf.series_radius(Params(0.5, 0.0)) == 1.0
        assert laplace_cf.series_radius(Params(0.5, 1.0)) == 0.0
        assert abs(laplace_cf.series_radius(Params(0.5, 0.75)) - 0.5) < 1e-15
        assert abs(laplace_cf.series_radius(Params(2.0, 0.75)) - 0.0625) < 1e-15

    def test_series_raises_below(self):
        p = Params(0.5, 0.5)
        r = laplace_cf.series_radius(p)
        with pytest.raises(DivergentRegime):
            laplace_cf.laplace_series(p, 0.99 * r)
        # just above, it settles
        assert laplace_cf.laplace_series(p, 1.2 * r).value > 0.0


class TestAlphaZero:
    # all F_j = 1, so L(z) = 1/(1+z) exactly

    @pytest.mark.parametrize("z", [2.0, 5.0, 50.0])
    def test_cf_direct(self, z):
        r = laplace_cf.laplace_cf(Params(1.0, 0.0), z)
        assert abs(r.value - 1.0 / (1.0 + z)) < 1e-12 / (1.0 + z)
        assert r.method == "laplace_cf"

    @pytest.mark.parametrize("z", [0.3, 0.7, 1.0])
    def test_cf_epsilon_below_radius(self, z):
        # the divergent tail is exactly geometric; extrapolation resums it
        r = laplace_cf.laplace_cf(Params(1.0, 0.0), z)
        assert abs(r.value - 1.0 / (1.0 + z)) < 1e-12
        assert r.method == "laplace_cf_epsilon"

    def test_series_matches(self):
        r = laplace_cf.laplace_series(Params(1.0, 0.0), 3.0)
        assert abs(r.value - 0.25) < r.abs_err + 1e-15


class TestConvergentsAreEulerPartialSums:
    def test_identity(self):
        # B_n = 1 termwise, so convergent_n = sum_{l<n} (-1)^l z^{-l} / prod F_j
        p = Params(0.5, 0.5)
        z = 2.0
        prods = [1.0]
        for j in range(1, 25):
            prods.append(prods[-1] * specfun.F_j(p, j))
        partial = 0.0
        for n, state in enumerate(laplace_cf._convergents(p, z, 20), start=1):
            partial += (-1.0) ** (n - 1) * z ** -(n - 1) / prods[n - 1]
            assert abs(state.convergent - partial) < 1e-13 * max(abs(partial), 1.0)


class TestCrossChecks:
    CELLS = [(0.25, 0.3), (0.5, 0.5), (0.75, 0.5), (0.5, 0.9), (1.5, 0.5)]

    @pytest.mark.parametrize("gamma,alpha", CELLS)
    def test_series_vs_cf_above_radius(self, gamma, alpha):
        p = Params(gamma, alpha)
        r = laplace_cf.series_radius(p)
        for z in (2.0 * r, 5.0 * r, 50.0 * r):
            a = laplace_cf.laplace_series(p, z)
            b = laplace_cf.laplace_cf(p, z)
            assert abs(a.value - b.value) < 1e-9 * abs(a.value)

    def test_alpha1_is_mittag_leffler(self):
        # prod F_j telescopes to Gamma(1-g)^l Gamma(1+lg), so
        # L(z) = z^{-1} E_gamma(-1/(Gamma(1-gamma) z))
        g = 0.5
        p = Params(g, 1.0)
        for z in (0.3, 1.0, 5.0):
            got = laplace_cf.laplace_cf(p, z).value
            want = erfcx(1.0 / (math.sqrt(math.pi) * z)) / z
            assert abs(got - want) < 1e-9 * want

    def test_alpha1_general_gamma_ml(self):
        g = 0.75
        p = Params(g, 1.0)
        B = math.gamma(1.0 - g)
        for z in (0.5, 2.0):
            got = laplace_cf.laplace_cf(p, z).value
            want = specfun.mittag_leffler(g, -1.0 / (B * z)) / z
            assert abs(got - want) < 1e-9 * want

    def test_epsilon_vs_generating_quadrature(self):
        p = Params(0.5, 0.5)
        z = 0.4  # below radius 1/sqrt(2): the extrapolation path
        assert laplace_cf.laplace_cf(p, z).method == "laplace_cf_epsilon"
        assert laplace_cf.laplace_vs_generating(p, z) < 1e-5

    def test_direct_vs_generating_quadrature(self):
        p = Params(0.5, 0.25)
        assert laplace_cf.laplace_vs_generating(p, 2.0) < 1e-6

    def test_large_gamma_reference(self):
        # at gamma = 8 the eight-fold product is within a percent of the
        # elementary large-exponent transform
        p = Params(8.0, 0.5)
        for z in (0.5, 1.0, 3.0):
            got = laplace_cf.laplace_cf(p, z).value
            want = closedform.large_gamma_laplace(p, z)
            assert abs(got - want) < 0.01 * want


class TestShape:
    def test_decreasing_in_z(self):
        p = Params(0.5, 0.25)
        zs = (0.9, 1.5, 3.0, 8.0, 30.0)
        vals = [laplace_cf.laplace_cf(p, z).value for z in zs]
        assert all(a > b > 0.0 for a, b in zip(vals, vals[1:]))

    def test_small_z_saturates_slowly(self):
        # zL(z) -> 1 as z -> inf (unit mass at the origin of e^{-zx}h scale)
        p = Params(0.5, 0.5)
        assert abs(1e6 * laplace_cf.laplace_cf(p, 1e6).value - 1.0) < 1e-5

    def test_honest_error_bars(self):
        p = Params(0.5, 0.5)
        z = 3.0
        a = laplace_cf.laplace_series(p, z)
        b = laplace_cf.laplace_cf(p, z)
        assert abs(a.value - b.value) <= a.abs_err + b.abs_err + 1e-15 * abs(a.value)


class TestGuards:
    def test_z_must_be_positive(self):
        with pytest.raises(DomainError):
            laplace_cf.laplace_cf(Params(0.5, 0.5), 0.0)
        with pytest.raises(DomainError):
            laplace_cf.laplace_series(Params(0.5, 0.5), -1.0)

    def test_alpha1_needs_gamma_below_one(self):
        with pytest.raises(DomainError):
            laplace_cf.laplace_cf(Params(1.5, 1.0), 2.0)
