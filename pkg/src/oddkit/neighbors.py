"""Exact Euclidean k-nearest-neighbor search.

Two strategies are provided. ``brute`` evaluates every pairwise distance and
is the reference. ``kdtree`` uses :class:`scipy.spatial.cKDTree` only to
shortlist candidates, then recomputes distances with the same arithmetic as
``brute`` and orders them the same way, so both strategies return identical
results bit for bit. Ties are broken by ascending point index.
"""

from concurrent.futures import ThreadPoolExecutor

import numpy as np
from scipy.spatial import cKDTree

from .core import resolve_threads

STRATEGIES = ("brute", "kdtree")

# upper bound on query_rows * n_points per brute-force distance block
_BLOCK_ELEMENTS = 1 << 20


def _sq_dists(P, q):
    # Accumulate feature by feature so each distance is computed with the
    # same sequence of operations regardless of how many rows are involved.
    acc = np.zeros(P.shape[0], dtype=np.float64)
    for j in range(P.shape[1]):
        diff = P[:, j] - q[j]
        acc += diff * diff
    return acc


def _sq_dist_block(Q, P):
    acc = np.zeros((Q.shape[0], P.shape[0]), dtype=np.float64)
    for j in range(P.shape[1]):
        diff = Q[:, j, None] - P[None, :, j]
        acc += diff * diff
    return acc


def euclidean(a, b):
    """Euclidean distance between two points of equal dimension."""
    a = np.asarray(a, dtype=np.float64).ravel()
    b = np.asarray(b, dtype=np.float64).ravel()
    if a.shape != b.shape:
        raise ValueError(
            f"dimension mismatch: {a.shape[0]} vs {b.shape[0]}")
    return float(np.sqrt(_sq_dists(a.reshape(1, -1), b)[0]))


def pairwise_distances(A, B):
    """Dense Euclidean distance matrix between the rows of ``A`` and ``B``."""
    A = np.atleast_2d(np.asarray(A, dtype=np.float64))
    B = np.atleast_2d(np.asarray(B, dtype=np.float64))
    if A.shape[1] != B.shape[1]:
        raise ValueError("dimension mismatch")
    return np.sqrt(_sq_dist_block(A, B))


def _partition(n, parts):
    bounds = np.linspace(0, n, min(parts, max(n, 1)) + 1).astype(int)
    return [(lo, hi) for lo, hi in zip(bounds[:-1], bounds[1:]) if hi > lo]


class NeighborIndex:
    """Immutable k-NN index over a fixed point set.

    Parameters
    ----------
    points : array-like of shape (n_points, n_features)
    strategy : {"kdtree", "brute"}, default "kdtree"
    """

    def __init__(self, points, strategy="kdtree"):
        if strategy not in STRATEGIES:
            raise ValueError(
                f"unknown strategy {strategy!r}; expected one of {STRATEGIES}")
        self.points = np.ascontiguousarray(points, dtype=np.float64)
        if self.points.ndim != 2:
            raise ValueError("points must be 2-D")
        self.strategy = strategy
        self._tree = cKDTree(self.points) if strategy == "kdtree" else None

    @property
    def n_points(self):
        return self.points.shape[0]

    def _check_k(self, k, excluding):
        available = self.n_points - (1 if excluding else 0)
        if not 1 <= k <= available:
            raise ValueError(
                f"k={k} out of range: need 1 <= k <= {available}")

    def query(self, q, k, exclude_index=None):
        """k nearest neighbors of a single point.

        Returns
        -------
        indices : ndarray of int, shape (k,)
        distances : ndarray of float, shape (k,), ascending
        """
        q = np.asarray(q, dtype=np.float64).reshape(1, -1)
        exclude = None if exclude_index is None else np.array([exclude_index])
        self._check_k(k, exclude is not None)
        ind, dist = self._query_rows(q, k, exclude)
        return ind[0], dist[0]

    def query_batch(self, Q, k, exclude_self=False, n_jobs=1):
        """k nearest neighbors for every row of ``Q``.

        With ``exclude_self=True`` row ``i`` of ``Q`` is taken to be point
        ``i`` of the index and is excluded from its own neighbor list.

        Returns
        -------
        indices : ndarray of int, shape (n_queries, k)
        distances : ndarray of float, shape (n_queries, k)
        """
        Q = np.ascontiguousarray(Q, dtype=np.float64)
        if Q.ndim != 2 or Q.shape[1] != self.points.shape[1]:
            raise ValueError("query dimension does not match the index")
        if exclude_self and Q.shape[0] != self.n_points:
            raise ValueError("exclude_self requires Q to be the indexed points")
        self._check_k(k, exclude_self)
        exclude = np.arange(Q.shape[0]) if exclude_self else None

        chunks = _partition(Q.shape[0], resolve_threads(n_jobs))
        if len(chunks) <= 1:
            return self._query_rows(Q, k, exclude)

        def work(bounds):
            lo, hi = bounds
            ex = None if exclude is None else exclude[lo:hi]
            return self._query_rows(Q[lo:hi], k, ex)

        with ThreadPoolExecutor(max_workers=len(chunks)) as pool:
            parts = list(pool.map(work, chunks))
        return (np.vstack([p[0] for p in parts]),
                np.vstack([p[1] for p in parts]))

    def _query_rows(self, Q, k, exclude):
        if self.strategy == "brute":
            return self._brute(Q, k, exclude)
        return self._kdtree(Q, k, exclude)

    def _brute(self, Q, k, exclude):
        m, n = Q.shape[0], self.n_points
        ind = np.empty((m, k), dtype=np.int64)
        dist = np.empty((m, k), dtype=np.float64)
        step = max(1, _BLOCK_ELEMENTS // max(n, 1))
        for lo in range(0, m, step):
            hi = min(m, lo + step)
            D = np.sqrt(_sq_dist_block(Q[lo:hi], self.points))
            if exclude is not None:
                D[np.arange(hi - lo), exclude[lo:hi]] = np.inf
            # stable sort keeps the lower index first among equal distances
            order = np.argsort(D, axis=1, kind="stable")[:, :k]
            ind[lo:hi] = order
            dist[lo:hi] = np.take_along_axis(D, order, axis=1)
        return ind, dist

    def _kdtree(self, Q, k, exclude):
        m, n = Q.shape[0], self.n_points
        k_probe = min(n, k + (1 if exclude is not None else 0))
        probe_dist, _ = self._tree.query(Q, k=k_probe)
        probe_dist = np.asarray(probe_dist).reshape(m, k_probe)
        # widen the radius so tree rounding can never drop a true neighbor
        radius = probe_dist[:, -1] * (1.0 + 1e-9) + 1e-12
        candidates = self._tree.query_ball_point(Q, radius)

        ind = np.empty((m, k), dtype=np.int64)
        dist = np.empty((m, k), dtype=np.float64)
        for i in range(m):
            cand = np.asarray(candidates[i], dtype=np.int64)
            if exclude is not None:
                cand = cand[cand != exclude[i]]
            cand.sort()
            d = np.sqrt(_sq_dists(self.points[cand], Q[i]))
            order = np.argsort(d, kind="stable")[:k]
            ind[i] = cand[order]
            dist[i] = d[order]
        return ind, dist


def knn_query(index, q, k, exclude_index=None):
    """Functional alias for :meth:`NeighborIndex.query`."""
    return index.query(q, k, exclude_index=exclude_index)
