"""Monte Carlo recursion engine: sampling, determinism, batching, KS."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from alphasun import simulate
from alphasun.errors import DomainError
from alphasun.types import Params, SimConfig


def cfg(gamma=1.0, alpha=0.0, n=100, paths=8, seed=3, **kw):
    return SimConfig(Params(gamma=gamma, alpha=alpha), n_steps=n, n_paths=paths, seed=seed, **kw)


class TestSampleInput:
    def test_pareto_closed_form(self):
        assert simulate.sample_input("pareto", 0.25, 1.0) == 4.0
        assert abs(simulate.sample_input("pareto", 0.04, 2.0) - 5.0) < 1e-14

    def test_frechet_closed_form(self):
        u = math.exp(-8.0)
        assert abs(simulate.sample_input("frechet", u, 0.5) - 8.0 ** -2.0) < 1e-16

    @given(st.floats(0.01, 0.99), st.floats(0.2, 3.0))
    @settings(max_examples=60, deadline=None)
    def test_inverse_cdf_property(self, u, gamma):
        # pareto: P(X <= x) = 1 - x^{-gamma}; plugging the sample back in
        # must recover the survival probability u
        x = simulate.sample_input("pareto", u, gamma)
        assert abs(x ** -gamma - u) < 1e-9
        # frechet: P(X <= x) = exp(-x^{-gamma}) recovers u itself
        x = simulate.sample_input("frechet", u, gamma)
        assert abs(math.exp(-(x ** -gamma)) - u) < 1e-9

    def test_vector_input(self):
        out = simulate.sample_input("pareto", np.array([0.25, 0.5]), 1.0)
        np.testing.assert_allclose(out, [4.0, 2.0])

    def test_guards(self):
        with pytest.raises(DomainError):
            simulate.sample_input("pareto", 0.0, 1.0)
        with pytest.raises(DomainError):
            simulate.sample_input("pareto", 1.0, 1.0)
        with pytest.raises(DomainError):
            simulate.sample_input("pareto", 0.5, -1.0)
        with pytest.raises(DomainError):
            simulate.sample_input("cauchy", 0.5, 1.0)


class TestRunRecursion:
    def test_alpha0_is_running_max(self):
        xs = [3.0, 1.0, 7.0, 2.0]
        assert simulate.run_recursion(5.0, xs, 0.0) == 7.0
        assert simulate.run_recursion(9.0, xs, 0.0) == 9.0

    def test_alpha1_adds_positive_parts(self):
        # alpha = 1: Y_n = Y_{n-1} + max(X_n, 0); positive inputs all add
        xs = [1.0, 2.0, 3.0]
        assert simulate.run_recursion(0.5, xs, 1.0) == 6.5

    def test_hand_computed_half(self):
        # Y_0 = 2: max(2, 1+3) = 4; max(4, 2+1) = 4; max(4, 2+5) = 7
        assert simulate.run_recursion(2.0, [3.0, 1.0, 5.0], 0.5) == 7.0

    def test_vectorized_matches_scalar(self):
        rng = np.random.default_rng(11)
        xs = rng.pareto(2.0, size=(40, 6)) + 1.0
        y0 = rng.pareto(2.0, size=6) + 1.0
        vec = simulate.run_recursion(y0, xs, 0.7)
        for p in range(6):
            assert vec[p] == simulate.run_recursion(y0[p], xs[:, p], 0.7)


class TestPaths:
    def test_trajectory_is_non_decreasing(self):
        traj = simulate.path_trajectory(cfg(gamma=0.5, alpha=0.5, n=300), path=2)
        assert traj.shape == (301,)
        assert np.all(np.diff(traj) >= 0.0)

    def test_trajectory_final_matches_run_path(self):
        c = cfg(gamma=1.0, alpha=0.25, n=200)
        assert simulate.path_trajectory(c, path=4)[-1] == simulate.run_path(c, path=4)

    def test_finals_match_per_path(self):
        c = cfg(gamma=0.75, alpha=0.5, n=150, paths=5)
        finals = simulate.normalized_finals(c)
        a_n = 150.0 ** (1.0 / 0.75)
        for p in range(5):
            assert finals[p] == simulate.run_path(c, path=p) / a_n


class TestDeterminism:
    def test_same_seed_reproduces(self):
        a = simulate.normalized_finals(cfg(alpha=0.5, paths=32))
        b = simulate.normalized_finals(cfg(alpha=0.5, paths=32))
        np.testing.assert_array_equal(a, b)

    def test_different_seeds_differ(self):
        a = simulate.normalized_finals(cfg(paths=16, seed=1))
        b = simulate.normalized_finals(cfg(paths=16, seed=2))
        assert not np.array_equal(a, b)

    def test_batching_invariance(self):
        # a longer run must reproduce the shorter run's paths exactly
        big = simulate.normalized_finals(cfg(paths=40))
        small = simulate.normalized_finals(cfg(paths=7))
        np.testing.assert_array_equal(big[:7], small)

    def test_block_boundary(self, monkeypatch):
        monkeypatch.setattr(simulate, "_BLOCK_PATHS", 4)
        blocked = simulate.normalized_finals(cfg(paths=10))
        monkeypatch.undo()
        whole = simulate.normalized_finals(cfg(paths=10))
        np.testing.assert_array_equal(blocked, whole)


class TestEmpirical:
    def test_empirical_cdf(self):
        xs, fs = simulate.empirical_cdf([3.0, 1.0, 2.0, 2.5])
        np.testing.assert_array_equal(xs, [1.0, 2.0, 2.5, 3.0])
        np.testing.assert_allclose(fs, [0.25, 0.5, 0.75, 1.0])

    def test_ks_alpha0_converges(self):
        # at alpha = 0 the limit law is exact, so KS ~ 1/sqrt(paths)
        c = cfg(gamma=1.0, alpha=0.0, n=1000, paths=4000, seed=7)
        ks = simulate.empirical_vs_limit(c)
        assert ks < 0.03

    def test_ks_with_supplied_cdf(self):
        c = cfg(gamma=1.0, alpha=0.0, n=800, paths=500, seed=5)
        ks = simulate.empirical_vs_limit(c, cdf=lambda x: np.exp(-1.0 / np.maximum(x, 1e-300)))
        assert ks < 0.08

    def test_wrong_norming_is_detected(self):
        # a deliberately wrong exponent shifts the whole sample; KS ~ 1
        c = cfg(gamma=1.0, alpha=0.0, n=1000, paths=500, seed=9, norming_exponent=2.0)
        assert simulate.empirical_vs_limit(c) > 0.5

    def test_needs_enough_paths(self):
        with pytest.raises(DomainError):
            simulate.empirical_vs_limit(cfg(paths=50))

    def test_default_cdf_needs_alpha_lt1(self):
        with pytest.raises(DomainError):
            simulate.empirical_vs_limit(cfg(gamma=0.5, alpha=1.0, paths=200))


class TestConfigGuards:
    def test_validation(self):
        with pytest.raises(DomainError):
            cfg(n=0)
        with pytest.raises(DomainError):
            cfg(paths=0)
        with pytest.raises(DomainError):
            cfg(input_dist="uniform")

    def test_default_exponent(self):
        assert cfg(gamma=0.5).exponent == 2.0
        assert cfg(gamma=0.5, norming_exponent=1.25).exponent == 1.25
