import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cfjs.core import JointMatrix, PreferencePair, loss, popularity
from cfjs.errors import PreconditionMaxPopularityError, PreconditionPopularityExceedsOneError
from cfjs.optimal import (
    _greedy_zero_loss,
    _transport_zero_loss,
    construct_capped,
    construct_zero_loss,
    min_loss,
    optimal_matrix,
)

from conftest import WORKED_MATRIX, random_pair_below_one, random_simplex, shrink_below_one

CASE_IV_N3 = np.array([1, 3, 9]) / 13


def sym(a):
    a = np.asarray(a, dtype=np.float64)
    return PreferencePair(a, a)


class TestMinLoss:
    def test_case_iv_n3(self):
        assert min_loss(sym(CASE_IV_N3)) == pytest.approx(75 / 676, rel=1e-14)

    def test_worked_zero(self, worked_pair):
        assert min_loss(worked_pair) == 0.0

    def test_s_max_two_n50(self):
        # the formula evaluated at S_max = 2 (A_k = B_k = 1 for one option)
        a = np.zeros(50)
        a[49] = 1.0
        assert min_loss(sym(a)) == pytest.approx(25 / 49, rel=1e-14)

    def test_n2_specialisation(self):
        for x in (0.55, 0.7, 0.9, 1.0):
            pair = sym([1 - x, x])
            assert min_loss(pair) == pytest.approx((2 * x - 1) ** 2, rel=1e-12)

    def test_permutation_invariance(self):
        rng = np.random.default_rng(7)
        for _ in range(50):
            a, b = random_simplex(rng, 6), random_simplex(rng, 6)
            perm = rng.permutation(6)
            assert min_loss(PreferencePair(a, b)) == pytest.approx(
                min_loss(PreferencePair(a[perm], b[perm])), rel=1e-14, abs=0
            )


class TestCapped:
    def test_case_iv_matrix(self):
        m = construct_capped(sym(CASE_IV_N3))
        eps = 5 / 52
        expected = np.array([
            [0, 0, 1 / 13 + eps],
            [0, 0, 3 / 13 + eps],
            [1 / 13 + eps, 3 / 13 + eps, 0],
        ])
        np.testing.assert_allclose(m.p, expected, rtol=1e-14)
        assert m.meta["eps"] == pytest.approx(eps)
        assert m.meta["pivot"] == 2
        assert loss(m, sym(CASE_IV_N3)) == pytest.approx(75 / 676, rel=1e-12)

    def test_n2(self):
        m = construct_capped(sym([0.3, 0.7]))
        np.testing.assert_allclose(m.p, [[0, 0.5], [0.5, 0]])
        assert loss(m, sym([0.3, 0.7])) == pytest.approx(0.16)
        assert min_loss(sym([0.3, 0.7])) == pytest.approx(0.16)

    def test_guard(self, worked_pair):
        with pytest.raises(PreconditionMaxPopularityError):
            construct_capped(worked_pair)

    def test_pivot_not_last(self):
        pair = PreferencePair(np.array([0.7, 0.2, 0.1]), np.array([0.6, 0.1, 0.3]))
        m = construct_capped(pair).check()
        assert m.meta["pivot"] == 0
        assert loss(m, pair) == pytest.approx(min_loss(pair), abs=1e-12)

    def test_no_tie_possible_above_one(self):
        # popularities sum to 2, so at most one can exceed 1
        rng = np.random.default_rng(2)
        for _ in range(200):
            pair = PreferencePair(random_simplex(rng, 4), random_simplex(rng, 4))
            if popularity(pair).max > 1:
                assert construct_capped(pair).meta["tie"] is False

    @settings(max_examples=200, deadline=None)
    @given(st.integers(2, 12), st.integers(0, 2**32 - 1))
    def test_equals_min_loss(self, n, seed):
        rng = np.random.default_rng(seed)
        a, b = random_simplex(rng, n), random_simplex(rng, n)
        pair = PreferencePair(a, b)
        if popularity(pair).max <= 1:
            return
        m = construct_capped(pair).check()
        assert abs(loss(m, pair) - min_loss(pair)) < 1e-12


class TestZeroLoss:
    def test_worked(self, worked_pair):
        m = construct_zero_loss(worked_pair).check()
        assert loss(m, worked_pair) < 1e-9
        # the worked example is also a valid witness
        assert loss(JointMatrix(WORKED_MATRIX), worked_pair) < 1e-30

    def test_n2(self):
        m = construct_zero_loss(sym([0.5, 0.5]))
        np.testing.assert_allclose(m.p, [[0, 0.5], [0.5, 0]])

    def test_guard(self):
        with pytest.raises(PreconditionPopularityExceedsOneError):
            construct_zero_loss(sym(CASE_IV_N3))

    def test_boundary_popularity_exactly_one(self):
        a = np.array([0.25, 0.25, 0.5])
        m = construct_zero_loss(sym(a)).check()
        assert loss(m, sym(a)) < 1e-9

    def test_deterministic_options(self):
        pair = PreferencePair(np.array([1.0, 0, 0]), np.array([0, 0.5, 0.5]))
        m = construct_zero_loss(pair).check()
        assert loss(m, pair) < 1e-9

    @settings(max_examples=300, deadline=None)
    @given(st.integers(2, 30), st.integers(0, 2**32 - 1), st.booleans(), st.floats(0.0, 0.9))
    def test_property(self, n, seed, symmetric, sparsity):
        rng = np.random.default_rng(seed)
        # zeroed options exercise the sparse boundary cases
        a = random_simplex(rng, n) * (rng.random(n) >= sparsity)
        b = random_simplex(rng, n) * (rng.random(n) >= sparsity)
        a[0] += 1e-3
        b[-1] += 1e-3
        b = a if symmetric else b
        pair = shrink_below_one(a / a.sum(), b / b.sum())
        m = construct_zero_loss(pair).check()
        assert loss(m, pair) < 1e-9
        assert m.meta["method"] == "greedy"

    def test_transport_fallback_agrees(self):
        rng = np.random.default_rng(3)
        for n in (3, 6, 12):
            pair = random_pair_below_one(rng, n)
            p = _transport_zero_loss(pair.a, pair.b)
            np.fill_diagonal(p, 0.0)
            assert loss(p / p.sum(), pair) < 1e-9
            g = _greedy_zero_loss(pair.a, pair.b)
            assert loss(g, pair) < 1e-9


def test_optimal_matrix_dispatch(worked_pair):
    assert optimal_matrix(worked_pair).meta["method"] == "greedy"
    assert "pivot" in optimal_matrix(sym(CASE_IV_N3)).meta
