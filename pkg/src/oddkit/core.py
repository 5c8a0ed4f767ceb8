"""Detector contract, contamination thresholding and score-to-probability
conversion shared by every model in the package.

All detectors follow the same life cycle::

    clf = KNN(k=5).fit(X_train)
    clf.decision_scores_         # train outlier scores
    clf.labels_                  # train binary labels
    clf.decision_function(X)     # raw scores, larger = more anomalous
    clf.predict(X)               # 0 = inlier, 1 = outlier
    clf.predict_proba(X)         # outlier probability in [0, 1]
"""

import math
import os

import numpy as np
from scipy.special import erf

DEFAULT_CONTAMINATION = 0.1


class DataError(ValueError):
    """Raised for malformed input data (bad CSV rows, non-finite values)."""


def check_matrix(X, name="X"):
    """Validate and return ``X`` as a C-contiguous 2-D float64 array."""
    X = np.ascontiguousarray(X, dtype=np.float64)
    if X.ndim == 1:
        X = X.reshape(-1, 1)
    if X.ndim != 2:
        raise ValueError(f"{name} must be 2-D, got shape {X.shape}")
    if X.shape[0] < 1 or X.shape[1] < 1:
        raise ValueError(f"{name} must have at least one row and one column")
    if not np.all(np.isfinite(X)):
        raise DataError(f"{name} contains NaN or infinite values")
    return X


def check_contamination(contamination):
    if not 0.0 < contamination <= 0.5:
        raise ValueError(
            f"contamination must be in (0, 0.5], got {contamination!r}")
    return float(contamination)


def resolve_threads(n_jobs):
    """Map ``None``/``-1`` to the machine's CPU count."""
    if n_jobs is None or n_jobs == -1:
        return os.cpu_count() or 1
    if n_jobs < 1:
        raise ValueError(f"n_jobs must be >= 1 or -1, got {n_jobs}")
    return int(n_jobs)


def threshold_from_scores(scores, contamination):
    """Return the ``100 * (1 - contamination)`` percentile of ``scores``.

    Linear interpolation between order statistics is used, so for
    ``scores = 1..10`` and ``contamination = 0.2`` the result is 8.2.
    """
    scores = np.asarray(scores, dtype=np.float64).ravel()
    if scores.size == 0:
        raise ValueError("scores must be nonempty")
    contamination = check_contamination(contamination)
    return float(np.percentile(scores, 100.0 * (1.0 - contamination)))


def labels_from_scores(scores, threshold):
    """Binary labels: 1 where ``score > threshold`` (strict), else 0."""
    scores = np.asarray(scores, dtype=np.float64).ravel()
    return (scores > threshold).astype(np.int64)


def proba_linear(scores, train_min, train_max):
    """Min-max normalize ``scores`` against the train score range, clamped
    to [0, 1]. A degenerate range yields all zeros."""
    scores = np.asarray(scores, dtype=np.float64).ravel()
    if train_max < train_min:
        raise ValueError("train_max must be >= train_min")
    if train_max == train_min:
        return np.zeros_like(scores)
    return np.clip((scores - train_min) / (train_max - train_min), 0.0, 1.0)


def proba_unify(scores, score_mean, score_std):
    """Gaussian scaling of scores into probabilities.

    ``max(0, erf((s - mean) / (std * sqrt(2))))``; zero ``std`` gives zeros.
    """
    scores = np.asarray(scores, dtype=np.float64).ravel()
    if score_std < 0:
        raise ValueError("score_std must be non-negative")
    if score_std == 0:
        return np.zeros_like(scores)
    return np.maximum(0.0, erf((scores - score_mean) / (score_std * math.sqrt(2.0))))


def zscore_standardize(S):
    """Column-wise z-score with the population standard deviation.

    Parameters
    ----------
    S : array-like of shape (n_samples,) or (n_samples, n_detectors)

    Returns
    -------
    Z : ndarray of the same shape. Columns with zero spread map to zeros.
    """
    S = np.asarray(S, dtype=np.float64)
    one_d = S.ndim == 1
    if one_d:
        S = S.reshape(-1, 1)
    if S.shape[0] == 0:
        raise ValueError("each column must be nonempty")
    mean = S.mean(axis=0)
    std = S.std(axis=0)
    safe = np.where(std > 0, std, 1.0)
    Z = np.where(std > 0, (S - mean) / safe, 0.0)
    return Z.ravel() if one_d else Z


class BaseDetector:
    """Common base for all outlier detectors.

    Subclasses implement ``_fit(X)``, returning the train scores, and
    ``_score(X)``, returning scores for unseen rows. They also provide
    ``_get_state``/``_set_state`` for persistence.

    Parameters
    ----------
    contamination : float in (0, 0.5], default 0.1
        Expected share of outliers in the train data; sets ``threshold_``.
    n_jobs : int, default 1
        Worker threads used by fit/score. Results never depend on it.

    Attributes
    ----------
    decision_scores_ : ndarray of shape (n_samples,)
        Outlier scores of the train data.
    threshold_ : float
        ``(1 - contamination)`` quantile of ``decision_scores_``.
    labels_ : ndarray of shape (n_samples,)
        Binary train labels, 1 iff score > threshold.
    """

    algo = None
    # hyperparameter names, in constructor order (contamination/n_jobs excluded)
    _param_names = ()

    def __init__(self, contamination=DEFAULT_CONTAMINATION, n_jobs=1):
        self.contamination = check_contamination(contamination)
        self.n_jobs = n_jobs

    def get_params(self):
        params = {name: getattr(self, name) for name in self._param_names}
        params["contamination"] = self.contamination
        return params

    def fit(self, X, y=None):
        """Fit the detector on ``X``. ``y`` is ignored."""
        X = check_matrix(X)
        self.n_features_in_ = X.shape[1]
        scores = np.asarray(self._fit(X), dtype=np.float64)
        self._process_decision_scores(scores)
        return self

    def _process_decision_scores(self, scores):
        self.decision_scores_ = scores
        self.threshold_ = threshold_from_scores(scores, self.contamination)
        self.labels_ = labels_from_scores(scores, self.threshold_)
        self.score_mean_ = float(scores.mean())
        self.score_std_ = float(scores.std())
        self.score_min_ = float(scores.min())
        self.score_max_ = float(scores.max())

    def _check_fitted(self):
        if not hasattr(self, "decision_scores_"):
            raise RuntimeError(
                f"{type(self).__name__} is not fitted; call fit() first")

    def decision_function(self, X):
        """Raw outlier scores of ``X``; larger means more anomalous."""
        self._check_fitted()
        X = check_matrix(X)
        if X.shape[1] != self.n_features_in_:
            raise ValueError(
                f"X has {X.shape[1]} features, detector was fitted "
                f"with {self.n_features_in_}")
        return np.asarray(self._score(X), dtype=np.float64)

    def predict(self, X):
        """Binary labels for ``X`` using the train threshold."""
        return labels_from_scores(self.decision_function(X), self.threshold_)

    def predict_proba(self, X, method="linear"):
        """Outlier probability of each row of ``X``.

        ``method="linear"`` min-max scales against the train score range,
        ``method="unify"`` applies Gaussian scaling with train mean/std.
        """
        scores = self.decision_function(X)
        if method == "linear":
            return proba_linear(scores, self.score_min_, self.score_max_)
        if method == "unify":
            return proba_unify(scores, self.score_mean_, self.score_std_)
        raise ValueError(f"unknown proba method {method!r}")

    def _fit(self, X):
        raise NotImplementedError

    def _score(self, X):
        raise NotImplementedError

    def _get_state(self):
        raise NotImplementedError

    def _set_state(self, state):
        raise NotImplementedError

    def __repr__(self):
        args = ", ".join(f"{k}={v!r}" for k, v in self.get_params().items())
        return f"{type(self).__name__}({args})"
