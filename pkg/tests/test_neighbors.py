import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oddkit.neighbors import NeighborIndex, euclidean, knn_query, pairwise_distances

POINTS = np.array([[0.0, 0.0], [0.0, 1.0], [0.0, 3.0]])


def brute_oracle(points, q, k, exclude=None):
    # plain-Python exhaustive search, ties by index
    cand = []
    for i, p in enumerate(points.tolist()):
        if i == exclude:
            continue
        d = math.sqrt(sum((a - b) * (a - b) for a, b in zip(p, q)))
        cand.append((d, i))
    cand.sort()
    return [i for _, i in cand[:k]], [d for d, _ in cand[:k]]


def test_euclidean():
    assert euclidean((0, 0), (3, 4)) == 5
    assert euclidean((1.5, -2.0), (1.5, -2.0)) == 0
    assert euclidean((1,), (4,)) == 3
    with pytest.raises(ValueError):
        euclidean((1, 2), (1, 2, 3))


@pytest.mark.parametrize("strategy", ["brute", "kdtree"])
class TestQuery:
    def test_exclude_self(self, strategy):
        ind, dist = knn_query(NeighborIndex(POINTS, strategy), (0, 0), 1,
                              exclude_index=0)
        assert ind.tolist() == [1] and dist.tolist() == [1.0]

    def test_far_query(self, strategy):
        ind, dist = NeighborIndex(POINTS, strategy).query((10, 0), 1)
        assert ind.tolist() == [0] and dist.tolist() == [10.0]

    def test_duplicates(self, strategy):
        idx = NeighborIndex(np.zeros((2, 2)), strategy)
        ind, dist = idx.query((0, 0), 1, exclude_index=0)
        assert ind.tolist() == [1] and dist.tolist() == [0.0]

    def test_ties_by_index(self, strategy):
        pts = np.array([[1.0, 0], [-1, 0], [0, 1], [0, -1], [0, 0]])
        ind, _ = NeighborIndex(pts, strategy).query((0, 0), 3, exclude_index=4)
        assert ind.tolist() == [0, 1, 2]

    def test_k_too_large(self, strategy):
        idx = NeighborIndex(POINTS, strategy)
        with pytest.raises(ValueError):
            idx.query((0, 0), 3, exclude_index=0)
        with pytest.raises(ValueError):
            idx.query((0, 0), 4)
        with pytest.raises(ValueError):
            idx.query((0, 0), 0)

    def test_batch_matches_oracle(self, strategy, rng):
        pts = rng.normal(size=(60, 3))
        Q = rng.normal(size=(25, 3))
        ind, dist = NeighborIndex(pts, strategy).query_batch(Q, 7)
        for i, q in enumerate(Q.tolist()):
            oi, od = brute_oracle(pts, q, 7)
            assert ind[i].tolist() == oi and dist[i].tolist() == od

    def test_batch_self_excluded(self, strategy, rng):
        pts = np.round(rng.normal(size=(40, 2)), 1)  # rounding forces ties
        ind, dist = NeighborIndex(pts, strategy).query_batch(
            pts, 5, exclude_self=True)
        for i, q in enumerate(pts.tolist()):
            oi, od = brute_oracle(pts, q, 5, exclude=i)
            assert ind[i].tolist() == oi and dist[i].tolist() == od


@settings(max_examples=60, deadline=None)
@given(st.integers(2, 200), st.integers(1, 8), st.integers(0, 2**32 - 1),
       st.booleans())
def test_kdtree_equals_brute(n, d, seed, gridded):
    rng = np.random.default_rng(seed)
    pts = rng.normal(size=(n, d))
    if gridded:
        pts = np.round(pts * 2) / 2
    k = int(rng.integers(1, n))
    a = NeighborIndex(pts, "brute").query_batch(pts, k, exclude_self=True)
    b = NeighborIndex(pts, "kdtree").query_batch(pts, k, exclude_self=True)
    assert np.array_equal(a[0], b[0]) and np.array_equal(a[1], b[1])


def test_prefix_property(rng):
    pts = rng.normal(size=(50, 2))
    idx = NeighborIndex(pts)
    _, d10 = idx.query_batch(pts, 10, exclude_self=True)
    _, d4 = idx.query_batch(pts, 4, exclude_self=True)
    assert np.array_equal(d10[:, :4], d4)
    assert np.all(np.diff(d10, axis=1) >= 0)


@pytest.mark.parametrize("strategy", ["brute", "kdtree"])
def test_thread_count_does_not_matter(strategy, rng):
    pts = rng.normal(size=(300, 4))
    idx = NeighborIndex(pts, strategy)
    one = idx.query_batch(pts, 6, exclude_self=True, n_jobs=1)
    many = idx.query_batch(pts, 6, exclude_self=True, n_jobs=8)
    assert np.array_equal(one[0], many[0]) and np.array_equal(one[1], many[1])


def test_pairwise_distances():
    D = pairwise_distances(POINTS, POINTS)
    assert D.tolist() == [[0, 1, 3], [1, 0, 2], [3, 2, 0]]


def test_bad_strategy():
    with pytest.raises(ValueError):
        NeighborIndex(POINTS, "balltree")
