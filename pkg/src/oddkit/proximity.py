"""Proximity-based detectors: kNN distance family, LOF, fast ABOD and HBOS.

Each algorithm is available both as a plain function (``knn_scores``,
``lof_scores``, ...) and as a detector class following
:class:`oddkit.core.BaseDetector`. The functions score the train set itself
when ``query`` is None, in which case every point is excluded from its own
neighborhood.
"""

from dataclasses import dataclass, field

import numpy as np

from .core import BaseDetector, check_matrix
from .neighbors import NeighborIndex

KNN_METHODS = ("largest", "mean", "median")

# cap on local reachability density when all reach-distances are zero
LRD_CAP = 1e12
# difference vectors shorter than this are skipped by ABOD
ABOD_MIN_NORM = 1e-12


def _neighbors(train, query, k, strategy, n_jobs, index=None):
    index = index or NeighborIndex(train, strategy=strategy)
    if query is None:
        return index.query_batch(train, k, exclude_self=True, n_jobs=n_jobs)
    return index.query_batch(query, k, n_jobs=n_jobs)


def _aggregate_knn(dist, method):
    if method == "largest":
        return dist[:, -1].copy()
    if method == "mean":
        return dist.mean(axis=1)
    if method == "median":
        return np.median(dist, axis=1)
    raise ValueError(f"unknown method {method!r}; expected one of {KNN_METHODS}")


def knn_scores(train, query=None, k=5, method="largest", strategy="kdtree",
               n_jobs=1):
    """Distance-to-neighbors outlier scores.

    Parameters
    ----------
    train : array-like of shape (n_train, n_features)
    query : array-like of shape (n_query, n_features) or None
        None scores the train rows with self excluded.
    k : int
        Number of neighbors.
    method : {"largest", "mean", "median"}
        Aggregate of the k neighbor distances. "largest" is the distance to
        the k-th neighbor.

    Returns
    -------
    scores : ndarray of shape (n_query,)
    """
    if method not in KNN_METHODS:
        raise ValueError(
            f"unknown method {method!r}; expected one of {KNN_METHODS}")
    train = check_matrix(train, "train")
    query = None if query is None else check_matrix(query, "query")
    _, dist = _neighbors(train, query, k, strategy, n_jobs)
    return _aggregate_knn(dist, method)


def _lrd(mean_reach):
    safe = np.where(mean_reach > 0, mean_reach, 1.0)
    return np.where(mean_reach > 0, 1.0 / safe, LRD_CAP)


def _lof_train_state(index, k, n_jobs):
    ind, dist = index.query_batch(index.points, k, exclude_self=True,
                                  n_jobs=n_jobs)
    k_dist = dist[:, -1].copy()
    reach = np.maximum(k_dist[ind], dist)
    lrd = _lrd(reach.mean(axis=1))
    return ind, k_dist, lrd


def _lof_from_neighbors(ind, dist, k_dist, lrd_train):
    reach = np.maximum(k_dist[ind], dist)
    lrd_query = _lrd(reach.mean(axis=1))
    return lrd_train[ind].mean(axis=1) / lrd_query


def lof_scores(train, query=None, k=20, strategy="kdtree", n_jobs=1):
    """Local outlier factor of each query row relative to ``train``.

    The reachability distance of ``a`` from neighbor ``b`` is
    ``max(k_distance(b), d(a, b))``; the local reachability density is the
    inverse of its mean over the k neighbors, and LOF is the mean ratio of
    neighbor densities to the point's own density. A zero mean
    reachability distance caps the density at ``LRD_CAP``.
    """
    train = check_matrix(train, "train")
    index = NeighborIndex(train, strategy=strategy)
    ind, k_dist, lrd = _lof_train_state(index, k, n_jobs)
    if query is None:
        return lrd[ind].mean(axis=1) / lrd
    query = check_matrix(query, "query")
    q_ind, q_dist = index.query_batch(query, k, n_jobs=n_jobs)
    return _lof_from_neighbors(q_ind, q_dist, k_dist, lrd)


def _abof(x, neighbors):
    diff = neighbors - x
    sq_norm = np.einsum("ij,ij->i", diff, diff)
    keep = np.sqrt(sq_norm) >= ABOD_MIN_NORM
    diff, sq_norm = diff[keep], sq_norm[keep]
    if diff.shape[0] < 2:
        return 0.0
    rows, cols = np.triu_indices(diff.shape[0], k=1)
    dots = np.einsum("ij,ij->i", diff[rows], diff[cols])
    weighted = dots / (sq_norm[rows] * sq_norm[cols])
    return float(np.var(weighted))


def abod_scores(train, query=None, k=10, strategy="kdtree", n_jobs=1):
    """Fast angle-based outlier scores over each point's k-neighborhood.

    For every unordered pair ``(y, z)`` of neighbors of ``x`` the weighted
    cosine ``<y-x, z-x> / (|y-x|^2 |z-x|^2)`` is formed; the ABOF is the
    (population) variance of these values. Outliers see their neighbors
    under a narrow range of angles, so the returned score is ``-ABOF``.
    Pairs containing a near-zero difference vector are skipped, and a
    point with no usable pair scores 0.
    """
    if k < 2:
        raise ValueError("ABOD needs k >= 2")
    train = check_matrix(train, "train")
    query = None if query is None else check_matrix(query, "query")
    ind, _ = _neighbors(train, query, k, strategy, n_jobs)
    points = train if query is None else query
    return np.array([-_abof(points[i], train[ind[i]])
                     for i in range(points.shape[0])])


@dataclass
class HbosState:
    """Per-feature equal-width histograms."""

    bin_edges: list = field(default_factory=list)
    densities: list = field(default_factory=list)
    alpha: float = 0.1
    tol: float = 0.5

    @property
    def n_features(self):
        return len(self.bin_edges)


def _bin_index(edges, values):
    n_bins = len(edges) - 1
    idx = np.searchsorted(edges, values, side="right") - 1
    return np.clip(idx, 0, n_bins - 1)


def hbos_fit(train, bins=10, alpha=0.1, tol=0.5):
    """Build one equal-width histogram per feature over the train range.

    Bin density is ``count / (n * width)``. Bins are right-open except the
    last, which is closed. A constant feature gets a single degenerate bin
    of density 1.
    """
    if bins < 1:
        raise ValueError("bins must be >= 1")
    if alpha <= 0:
        raise ValueError("alpha must be > 0")
    if tol < 0:
        raise ValueError("tol must be >= 0")
    train = check_matrix(train, "train")
    n = train.shape[0]
    state = HbosState(alpha=float(alpha), tol=float(tol))
    for col in train.T:
        lo, hi = col.min(), col.max()
        if lo == hi:
            state.bin_edges.append(np.array([lo, hi]))
            state.densities.append(np.array([1.0]))
            continue
        edges = np.linspace(lo, hi, bins + 1)
        counts = np.bincount(_bin_index(edges, col), minlength=bins)
        width = (hi - lo) / bins
        state.bin_edges.append(edges)
        state.densities.append(counts / (n * width))
    return state


def _feature_density(edges, densities, values, tol):
    lo, hi = edges[0], edges[-1]
    slack = tol * (hi - lo) / len(densities)
    inside = (values >= lo - slack) & (values <= hi + slack)
    return np.where(inside, densities[_bin_index(edges, values)], 0.0)


def hbos_scores(state, query):
    """Sum over features of ``-log(density + alpha)``.

    Values outside the train range by at most ``tol`` bin widths fall into
    the nearest edge bin; values farther out get density 0.
    """
    query = check_matrix(query, "query")
    if query.shape[1] != state.n_features:
        raise ValueError("query feature count does not match the histograms")
    scores = np.zeros(query.shape[0], dtype=np.float64)
    for j in range(state.n_features):
        dens = _feature_density(state.bin_edges[j], state.densities[j],
                                query[:, j], state.tol)
        scores += -np.log(dens + state.alpha)
    return scores


class KNN(BaseDetector):
    """k-nearest-neighbor distance detector.

    Parameters
    ----------
    k : int, default 5
    method : {"largest", "mean", "median"}, default "largest"
        "mean" gives the average-kNN variant.
    strategy : {"kdtree", "brute"}, default "kdtree"
    """

    algo = "knn"
    _param_names = ("k", "method", "strategy")

    def __init__(self, k=5, method="largest", strategy="kdtree",
                 contamination=0.1, n_jobs=1):
        super().__init__(contamination=contamination, n_jobs=n_jobs)
        if k < 1:
            raise ValueError("k must be >= 1")
        if method not in KNN_METHODS:
            raise ValueError(
                f"unknown method {method!r}; expected one of {KNN_METHODS}")
        self.k = int(k)
        self.method = method
        self.strategy = strategy

    def _fit(self, X):
        self._index = NeighborIndex(X, strategy=self.strategy)
        _, dist = self._index.query_batch(X, self.k, exclude_self=True,
                                          n_jobs=self.n_jobs)
        return _aggregate_knn(dist, self.method)

    def _score(self, X):
        _, dist = self._index.query_batch(X, self.k, n_jobs=self.n_jobs)
        return _aggregate_knn(dist, self.method)

    def _get_state(self):
        return {"train": self._index.points.tolist()}

    def _set_state(self, state):
        self._index = NeighborIndex(np.array(state["train"], dtype=np.float64),
                                    strategy=self.strategy)


class LOF(BaseDetector):
    """Local outlier factor.

    Parameters
    ----------
    k : int, default 20
        Neighborhood size.
    strategy : {"kdtree", "brute"}, default "kdtree"
    """

    algo = "lof"
    _param_names = ("k", "strategy")

    def __init__(self, k=20, strategy="kdtree", contamination=0.1, n_jobs=1):
        super().__init__(contamination=contamination, n_jobs=n_jobs)
        if k < 1:
            raise ValueError("k must be >= 1")
        self.k = int(k)
        self.strategy = strategy

    def _fit(self, X):
        self._index = NeighborIndex(X, strategy=self.strategy)
        ind, self.k_distances_, self.lrd_ = _lof_train_state(
            self._index, self.k, self.n_jobs)
        return self.lrd_[ind].mean(axis=1) / self.lrd_

    def _score(self, X):
        ind, dist = self._index.query_batch(X, self.k, n_jobs=self.n_jobs)
        return _lof_from_neighbors(ind, dist, self.k_distances_, self.lrd_)

    def _get_state(self):
        return {"train": self._index.points.tolist(),
                "k_distances": self.k_distances_.tolist(),
                "lrd": self.lrd_.tolist()}

    def _set_state(self, state):
        self._index = NeighborIndex(np.array(state["train"], dtype=np.float64),
                                    strategy=self.strategy)
        self.k_distances_ = np.array(state["k_distances"], dtype=np.float64)
        self.lrd_ = np.array(state["lrd"], dtype=np.float64)


class ABOD(BaseDetector):
    """Fast angle-based outlier detector (k-neighborhood variant).

    Scores are the negated angle-based outlier factor so that larger means
    more anomalous.
    """

    algo = "abod"
    _param_names = ("k", "strategy")

    def __init__(self, k=10, strategy="kdtree", contamination=0.1, n_jobs=1):
        super().__init__(contamination=contamination, n_jobs=n_jobs)
        if k < 2:
            raise ValueError("ABOD needs k >= 2")
        self.k = int(k)
        self.strategy = strategy

    def _fit(self, X):
        self._index = NeighborIndex(X, strategy=self.strategy)
        return self._abod(X, exclude_self=True)

    def _score(self, X):
        return self._abod(X, exclude_self=False)

    def _abod(self, X, exclude_self):
        train = self._index.points
        ind, _ = self._index.query_batch(X, self.k, exclude_self=exclude_self,
                                         n_jobs=self.n_jobs)
        return np.array([-_abof(X[i], train[ind[i]])
                         for i in range(X.shape[0])])

    def _get_state(self):
        return {"train": self._index.points.tolist()}

    def _set_state(self, state):
        self._index = NeighborIndex(np.array(state["train"], dtype=np.float64),
                                    strategy=self.strategy)


class HBOS(BaseDetector):
    """Histogram-based outlier score with static equal-width bins.

    Parameters
    ----------
    bins : int, default 10
    alpha : float, default 0.1
        Added to every density before taking the log.
    tol : float, default 0.5
        Out-of-range slack, in bin widths, before a value counts as empty.
    """

    algo = "hbos"
    _param_names = ("bins", "alpha", "tol")

    def __init__(self, bins=10, alpha=0.1, tol=0.5, contamination=0.1,
                 n_jobs=1):
        super().__init__(contamination=contamination, n_jobs=n_jobs)
        self.bins = int(bins)
        self.alpha = float(alpha)
        self.tol = float(tol)

    def _fit(self, X):
        self.state_ = hbos_fit(X, self.bins, self.alpha, self.tol)
        return hbos_scores(self.state_, X)

    def _score(self, X):
        return hbos_scores(self.state_, X)

    def _get_state(self):
        return {"bin_edges": [e.tolist() for e in self.state_.bin_edges],
                "densities": [d.tolist() for d in self.state_.densities]}

    def _set_state(self, state):
        self.state_ = HbosState(
            bin_edges=[np.array(e, dtype=np.float64) for e in state["bin_edges"]],
            densities=[np.array(d, dtype=np.float64) for d in state["densities"]],
            alpha=self.alpha, tol=self.tol)
