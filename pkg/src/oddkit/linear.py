"""Principal-component outlier detector.

The score of a point is the sum over retained principal components of its
squared projection divided by the component's variance, i.e. the squared
Mahalanobis distance restricted to the non-degenerate subspace.
"""

from dataclasses import dataclass

import numpy as np

from .core import BaseDetector, check_matrix

# eigenvalues below this fraction of the largest one are dropped
EIG_RTOL = 1e-9


@dataclass
class PcaState:
    mean: np.ndarray
    components: np.ndarray   # (kept, d), orthonormal rows
    eigenvalues: np.ndarray  # (kept,), descending

    @property
    def kept(self):
        return self.eigenvalues.shape[0]


def pca_fit(train):
    """Eigendecomposition of the population covariance of ``train``."""
    train = check_matrix(train, "train")
    if train.shape[0] < 2:
        raise ValueError("PCA needs at least 2 train rows")
    mean = train.mean(axis=0)
    centered = train - mean
    cov = centered.T @ centered / train.shape[0]
    eigvals, eigvecs = np.linalg.eigh(cov)
    order = np.argsort(eigvals)[::-1]
    eigvals, eigvecs = eigvals[order], eigvecs[:, order]
    top = eigvals[0]
    keep = eigvals >= EIG_RTOL * top if top > 0 else np.zeros_like(eigvals, bool)
    return PcaState(mean=mean,
                    components=np.ascontiguousarray(eigvecs[:, keep].T),
                    eigenvalues=eigvals[keep].copy())


def pca_scores(state, query):
    """Weighted sum of squared projections onto the retained components."""
    query = check_matrix(query, "query")
    if query.shape[1] != state.mean.shape[0]:
        raise ValueError("query feature count does not match the fitted PCA")
    proj = (query - state.mean) @ state.components.T
    return (proj * proj / state.eigenvalues).sum(axis=1)


class PCA(BaseDetector):
    """PCA reconstruction-weighted outlier detector.

    No standardization is applied; scale features beforehand if they are
    measured in different units.
    """

    algo = "pca"

    def _fit(self, X):
        self.state_ = pca_fit(X)
        return pca_scores(self.state_, X)

    def _score(self, X):
        return pca_scores(self.state_, X)

    def _get_state(self):
        return {"mean": self.state_.mean.tolist(),
                "components": self.state_.components.tolist(),
                "eigenvalues": self.state_.eigenvalues.tolist()}

    def _set_state(self, state):
        d = len(state["mean"])
        self.state_ = PcaState(
            mean=np.array(state["mean"], dtype=np.float64),
            components=np.array(state["components"],
                                dtype=np.float64).reshape(-1, d),
            eigenvalues=np.array(state["eigenvalues"], dtype=np.float64))
