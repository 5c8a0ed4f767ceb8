"""Combine score matrices from several detectors into one score vector.

Inputs are ``(n_samples, n_detectors)`` matrices. Standardize the columns
first (see :func:`oddkit.core.zscore_standardize`) when the detectors'
score scales differ; the combiners here do not rescale.

Row means are computed with :func:`math.fsum`, which is correctly rounded
and therefore independent of column order. This is what makes
``aom(S, m) == average(S)`` and ``moa(S, 1) == average(S)`` hold exactly
even though the bucketed combiners shuffle the columns.
"""

import math

import numpy as np

METHODS = ("average", "max", "aom", "moa")


def _as_score_matrix(S):
    S = np.asarray(S, dtype=np.float64)
    if S.ndim == 1:
        S = S.reshape(-1, 1)
    if S.ndim != 2 or S.shape[1] < 1:
        raise ValueError("score matrix must be 2-D with at least one column")
    if not np.all(np.isfinite(S)):
        raise ValueError("score matrix contains non-finite values")
    return S


def _row_mean(S):
    m = S.shape[1]
    mean = np.array([math.fsum(row) / m for row in S.tolist()],
                    dtype=np.float64)
    # the division can round past the row bounds
    return np.clip(mean, S.min(axis=1), S.max(axis=1))


def combine_average(S):
    """Row-wise arithmetic mean."""
    return _row_mean(_as_score_matrix(S))


def combine_max(S):
    """Row-wise maximum."""
    return _as_score_matrix(S).max(axis=1)


def bucket_partition(n_detectors, n_buckets, seed):
    """Shuffle detector indices with ``seed`` and split them into
    ``n_buckets`` contiguous groups; the first ``n_detectors % n_buckets``
    groups get one extra member."""
    if not 1 <= n_buckets <= n_detectors:
        raise ValueError(
            f"n_buckets must be in [1, {n_detectors}], got {n_buckets}")
    perm = np.random.default_rng(seed).permutation(n_detectors)
    return np.array_split(perm, n_buckets)


def combine_aom(S, n_buckets, seed=0):
    """Average of Maximum: mean over buckets of the within-bucket max."""
    S = _as_score_matrix(S)
    buckets = bucket_partition(S.shape[1], n_buckets, seed)
    maxima = np.column_stack([S[:, b].max(axis=1) for b in buckets])
    return _row_mean(maxima)


def combine_moa(S, n_buckets, seed=0):
    """Maximum of Average: max over buckets of the within-bucket mean."""
    S = _as_score_matrix(S)
    buckets = bucket_partition(S.shape[1], n_buckets, seed)
    means = np.column_stack([_row_mean(S[:, b]) for b in buckets])
    return means.max(axis=1)


def combine(S, method="average", n_buckets=None, seed=0):
    """Dispatch to one of the combiners by name."""
    if method == "average":
        return combine_average(S)
    if method == "max":
        return combine_max(S)
    if method in ("aom", "moa"):
        if n_buckets is None:
            raise ValueError(f"{method} requires n_buckets")
        fn = combine_aom if method == "aom" else combine_moa
        return fn(S, n_buckets, seed)
    raise ValueError(f"unknown method {method!r}; expected one of {METHODS}")
