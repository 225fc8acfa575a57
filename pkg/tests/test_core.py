"""Penalty evaluation, subgradients and metrics."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra import numpy as hnp

from wsprox import (
    ProxParams,
    as_weight_vector,
    eval_R,
    metrics,
    sorted_subgradient_coefficients,
    stable_sort_permutation,
    subgradient_R,
)

finite_floats = st.floats(min_value=-1e6, max_value=1e6, allow_nan=False,
                          allow_infinity=False, width=64)


def weight_vectors(min_d=1, max_d=64):
    return hnp.arrays(np.float64, st.integers(min_d, max_d), elements=finite_floats)


class TestAsWeightVector:
    def test_accepts_list(self):
        w = as_weight_vector([1.0, 2.0])
        assert w.dtype == np.float64 and w.shape == (2,)

    def test_rejects_2d(self):
        with pytest.raises(ValueError):
            as_weight_vector([[1.0, 2.0]])

    def test_rejects_empty(self):
        with pytest.raises(ValueError):
            as_weight_vector([])

    @pytest.mark.parametrize("bad", [np.nan, np.inf, -np.inf])
    def test_rejects_nonfinite(self, bad):
        with pytest.raises(ValueError):
            as_weight_vector([1.0, bad])


class TestStableSortPermutation:
    def test_sorts(self):
        w = np.array([3.0, 1.0, 2.0])
        p = stable_sort_permutation(w)
        assert np.all(np.diff(w[p]) >= 0)

    def test_stability_on_ties(self):
        w = np.array([2.0, 1.0, 2.0, 1.0])
        assert stable_sort_permutation(w).tolist() == [1, 3, 0, 2]


class TestProxParams:
    def test_defaults_valid(self):
        ProxParams()

    @pytest.mark.parametrize("kwargs", [
        {"alpha": -0.1}, {"beta": -1.0}, {"rho": -0.01}, {"rho": 1.5},
        {"eta": 0.0}, {"eta": -1.0},
    ])
    def test_rejects_out_of_range(self, kwargs):
        with pytest.raises(ValueError):
            ProxParams(**kwargs)


class TestEvalR:
    def test_all_equal_is_zero(self):
        assert eval_R([5.0, 5.0, 5.0]) == 0.0

    def test_three_point_ramp(self):
        # pairwise diffs 1+1+2 = 4, divided by d-1 = 2
        for mode in ("naive", "fast", "parallel"):
            assert eval_R([0.0, 1.0, 2.0], mode=mode) == pytest.approx(2.0, abs=1e-12)

    def test_hand_value(self):
        # |1-2| + |1-4| + |2-4| = 6 over d-1 = 2
        assert eval_R([1.0, 2.0, 4.0]) == pytest.approx(3.0, abs=1e-12)

    def test_single_weight_is_zero(self):
        for mode in ("naive", "fast", "parallel"):
            assert eval_R([7.0], mode=mode) == 0.0

    def test_unknown_mode(self):
        with pytest.raises(ValueError):
            eval_R([1.0, 2.0], mode="bogus")

    def test_rejects_nonfinite(self):
        with pytest.raises(ValueError):
            eval_R([1.0, np.nan])

    @settings(max_examples=100, deadline=None)
    @given(weight_vectors(min_d=2, max_d=200))
    def test_mode_agreement(self, w):
        a = eval_R(w, mode="naive")
        b = eval_R(w, mode="fast")
        c = eval_R(w, mode="parallel")
        assert b == pytest.approx(a, rel=1e-9, abs=1e-12)
        assert c == pytest.approx(a, rel=1e-9, abs=1e-12)

    @settings(max_examples=100, deadline=None)
    @given(weight_vectors(min_d=2, max_d=64), st.randoms(use_true_random=False))
    def test_permutation_invariance(self, w, rnd):
        perm = list(range(w.shape[0]))
        rnd.shuffle(perm)
        pw = w[np.array(perm)]
        assert eval_R(pw, mode="naive") == eval_R(w, mode="naive")
        assert eval_R(pw, mode="fast") == pytest.approx(
            eval_R(w, mode="fast"), rel=1e-12, abs=1e-12)

    @settings(max_examples=100, deadline=None)
    @given(weight_vectors(min_d=2, max_d=64),
           st.floats(min_value=1e-3, max_value=1e3))
    def test_positive_homogeneity(self, w, c):
        assert eval_R(c * w) == pytest.approx(c * eval_R(w), rel=1e-12, abs=1e-12)

    def test_parallel_bit_identical_across_thread_counts(self):
        rng = np.random.default_rng(3)
        w = rng.standard_normal(10_001)
        vals = {eval_R(w, mode="parallel", threads=t) for t in (1, 2, 8)}
        assert len(vals) == 1


class TestSortedSubgradientCoefficients:
    def test_d2(self):
        assert sorted_subgradient_coefficients(2).tolist() == [-1.0, 1.0]

    def test_d3(self):
        assert sorted_subgradient_coefficients(3).tolist() == [-1.0, 0.0, 1.0]

    def test_d4(self):
        np.testing.assert_allclose(
            sorted_subgradient_coefficients(4),
            [-1.0, -1.0 / 3.0, 1.0 / 3.0, 1.0], atol=1e-15)

    @pytest.mark.parametrize("d", [0, 1])
    def test_rejects_small_d(self, d):
        with pytest.raises(ValueError):
            sorted_subgradient_coefficients(d)

    @pytest.mark.parametrize("d", [2, 3, 17, 1000])
    def test_zero_sum(self, d):
        assert abs(sorted_subgradient_coefficients(d).sum()) <= 1e-12


class TestSubgradientR:
    def test_d2_order(self):
        np.testing.assert_array_equal(subgradient_R([10.0, 0.0]), [1.0, -1.0])

    def test_identity_sort(self):
        np.testing.assert_array_equal(subgradient_R([0.0, 1.0, 2.0]), [-1.0, 0.0, 1.0])

    def test_tie_uses_stable_order(self):
        np.testing.assert_array_equal(subgradient_R([2.0, 2.0]), [-1.0, 1.0])

    def test_rejects_d1(self):
        with pytest.raises(ValueError):
            subgradient_R([1.0])

    @settings(max_examples=150, deadline=None)
    @given(weight_vectors(min_d=2, max_d=10), weight_vectors(min_d=2, max_d=10))
    def test_subgradient_inequality(self, w, u):
        if u.shape != w.shape:
            u = np.resize(u, w.shape)
        g = subgradient_R(w)
        lhs = eval_R(u, mode="naive")
        rw = eval_R(w, mode="naive")
        rhs = rw + float(g @ (u - w))
        # slack scales with the summand magnitudes, not the (possibly
        # cancelling) result
        scale = max(1.0, abs(lhs), abs(rw), float(np.abs(g * (u - w)).sum()))
        assert lhs >= rhs - 1e-10 * scale

    @settings(max_examples=100, deadline=None)
    @given(weight_vectors(min_d=2, max_d=128))
    def test_zero_sum(self, w):
        assert abs(subgradient_R(w).sum()) <= 1e-12


class TestMetrics:
    def test_mixed_example(self):
        m = metrics([1.0, 1.0, 2.0, 0.0])
        assert m.sparsity == pytest.approx(0.25)
        assert m.distinct_nonzero == 2
        assert m.weight_sharing == pytest.approx(1.0 / 3.0)

    def test_all_zero(self):
        m = metrics([0.0, 0.0, 0.0])
        assert m.sparsity == 1.0
        assert m.weight_sharing == 0.0
        assert m.distinct_nonzero == 0

    def test_all_tied(self):
        m = metrics([3.0, 3.0, 3.0, 3.0])
        assert m.sparsity == 0.0
        assert m.weight_sharing == pytest.approx(0.75)

    def test_zero_tol_widens_zero_class(self):
        m = metrics([1e-4, 1.0, -1.0], zero_tol=1e-3)
        assert m.nonzero_count == 2
        assert m.sparsity == pytest.approx(1.0 / 3.0)

    def test_rejects_negative_tol(self):
        with pytest.raises(ValueError):
            metrics([1.0], zero_tol=-1.0)

    def test_distinctness_is_exact_equality(self):
        m = metrics([1.0, np.nextafter(1.0, 2.0)])
        assert m.distinct_nonzero == 2
