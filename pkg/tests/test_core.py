import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from oddkit.core import (BaseDetector, check_matrix, labels_from_scores,
                         proba_linear, proba_unify, threshold_from_scores,
                         zscore_standardize, DataError)
from oddkit.proximity import KNN

finite = st.floats(-1e6, 1e6, allow_nan=False, allow_infinity=False)


def erf_series(x, terms=40):
    # Maclaurin series of erf, independent of scipy
    total = sum((-1) ** n * x ** (2 * n + 1) / (math.factorial(n) * (2 * n + 1))
                for n in range(terms))
    return 2.0 / math.sqrt(math.pi) * total


def percentile_by_hand(values, q):
    v = sorted(values)
    pos = q / 100.0 * (len(v) - 1)
    lo = int(math.floor(pos))
    hi = min(lo + 1, len(v) - 1)
    return v[lo] + (pos - lo) * (v[hi] - v[lo])


class TestThreshold:
    def test_one_to_ten(self):
        assert percentile_by_hand(range(1, 11), 80) == pytest.approx(8.2)
        assert threshold_from_scores(np.arange(1, 11), 0.2) == pytest.approx(8.2)

    def test_two_points_midpoint(self):
        assert threshold_from_scores([0, 1], 0.5) == 0.5

    @pytest.mark.parametrize("c", [0.01, 0.1, 0.5])
    def test_constant(self, c):
        assert threshold_from_scores([5, 5, 5], c) == 5

    def test_errors(self):
        with pytest.raises(ValueError):
            threshold_from_scores([], 0.1)
        for c in (0.0, -0.1, 0.51):
            with pytest.raises(ValueError):
                threshold_from_scores([1, 2], c)

    @given(st.lists(finite, min_size=1, max_size=50), st.floats(0.01, 0.5))
    def test_matches_hand_percentile(self, values, c):
        expected = percentile_by_hand(values, 100 * (1 - c))
        assert threshold_from_scores(values, c) == pytest.approx(
            expected, rel=1e-9, abs=1e-6)


class TestLabels:
    def test_strict(self):
        assert labels_from_scores([1, 2, 3], 2).tolist() == [0, 0, 1]

    def test_at_threshold(self):
        t = threshold_from_scores(np.arange(1, 11), 0.2)
        assert labels_from_scores([t, 9, 10], t).tolist() == [0, 1, 1]

    def test_empty(self):
        assert labels_from_scores([], 0).tolist() == []

    @given(arrays(np.float64, st.integers(1, 30), elements=st.floats(-50, 50)),
           st.floats(-50, 50))
    def test_invariant_under_increasing_transform(self, s, t):
        # scaling by a power of two is exact, so order and ties are kept
        def f(x):
            return np.ldexp(x, 5)
        assert np.array_equal(labels_from_scores(s, t),
                              labels_from_scores(f(s), f(t)))


class TestProba:
    @pytest.mark.parametrize("s, expected", [(5, 0.5), (12, 1.0), (-1, 0.0)])
    def test_linear(self, s, expected):
        assert proba_linear([s], 0, 10)[0] == expected

    def test_linear_degenerate(self):
        assert proba_linear([1, 2, 3], 4, 4).tolist() == [0, 0, 0]

    def test_unify_values(self):
        mean, std = 3.0, 2.0
        p = proba_unify([mean, mean + std * math.sqrt(2), mean - 100], mean, std)
        assert p[0] == 0.0
        assert p[1] == pytest.approx(erf_series(1.0), abs=1e-4)
        assert p[1] == pytest.approx(0.8427, abs=1e-4)
        assert p[2] == 0.0

    def test_unify_zero_std(self):
        assert proba_unify([1, 5], 1, 0).tolist() == [0, 0]

    @given(st.lists(finite, min_size=2, max_size=30))
    def test_monotone(self, values):
        s = np.sort(np.array(values))
        lin = proba_linear(s, -10.0, 10.0)
        uni = proba_unify(s, 0.5, 3.0)
        assert np.all(np.diff(lin) >= 0)
        assert np.all(np.diff(uni) >= 0)
        assert np.all((lin >= 0) & (lin <= 1) & (uni >= 0) & (uni <= 1))


class TestZscore:
    def test_values(self):
        z = zscore_standardize(np.array([[1, 4, -1], [2, 4, 1], [3, 4, np.nan]])[:2])
        assert z[:, 1].tolist() == [0, 0]
        assert z[:, 2].tolist() == [-1, 1]
        col = zscore_standardize([1.0, 2.0, 3.0])
        assert col == pytest.approx([-math.sqrt(1.5), 0, math.sqrt(1.5)], abs=1e-12)
        assert col == pytest.approx([-1.2247, 0, 1.2247], abs=1e-4)

    @given(arrays(np.float64, st.tuples(st.integers(2, 20), st.integers(1, 4)),
                  elements=st.floats(-1e3, 1e3)))
    def test_idempotent(self, S):
        Z = zscore_standardize(S)
        nondegenerate = S.std(axis=0) > 1e-6 * (1 + np.abs(S).max(axis=0))
        Z2 = zscore_standardize(Z)
        np.testing.assert_allclose(Z2[:, nondegenerate], Z[:, nondegenerate],
                                   atol=1e-9)


class TestCheckMatrix:
    def test_vector_becomes_column(self):
        assert check_matrix([1, 2, 3]).shape == (3, 1)

    def test_rejects_nan(self):
        with pytest.raises(DataError):
            check_matrix([[1.0, np.nan]])

    def test_rejects_empty(self):
        with pytest.raises(ValueError):
            check_matrix(np.zeros((0, 2)))


class TestDetectorContract:
    def test_unfitted(self):
        with pytest.raises(RuntimeError):
            KNN().decision_function([[0.0]])

    def test_fitted_attributes(self, rng):
        X = rng.normal(size=(200, 3))
        clf = KNN(k=5, contamination=0.1).fit(X)
        assert clf.threshold_ == pytest.approx(
            np.percentile(clf.decision_scores_, 90))
        assert clf.labels_.sum() == (clf.decision_scores_ > clf.threshold_).sum()
        assert abs(clf.labels_.sum() - 20) <= 1
        X_new = rng.normal(size=(50, 3))
        assert np.array_equal(clf.predict(X_new),
                              clf.decision_function(X_new) > clf.threshold_)
        p = clf.predict_proba(X)
        assert np.all((p >= 0) & (p <= 1))
        train_p = proba_linear(clf.decision_scores_, clf.score_min_,
                               clf.score_max_)
        assert train_p.min() == 0 and train_p.max() == 1
        pu = clf.predict_proba(X, method="unify")
        assert np.all((pu >= 0) & (pu <= 1))
        with pytest.raises(ValueError):
            clf.predict_proba(X, method="softmax")

    def test_feature_mismatch(self, rng):
        clf = KNN(k=3).fit(rng.normal(size=(20, 2)))
        with pytest.raises(ValueError):
            clf.decision_function(rng.normal(size=(5, 3)))

    def test_contamination_validated(self):
        with pytest.raises(ValueError):
            KNN(contamination=0.7)

    def test_base_is_abstract(self):
        with pytest.raises(NotImplementedError):
            BaseDetector().fit([[1.0], [2.0]])
