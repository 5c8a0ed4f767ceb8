"""Ensemble detectors: Isolation Forest and Feature Bagging.

Randomness comes from :class:`numpy.random.PCG64` generators. A single
integer ``seed`` feeds a :class:`numpy.random.SeedSequence`, which is
spawned into one child seed per tree (or per bagging round) before any work
starts. Each tree/round therefore consumes its own stream and the result
does not depend on how the work is scheduled across threads.
"""

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .combination import combine_average, combine_max
from .core import BaseDetector, check_matrix, resolve_threads
from .proximity import LOF

EULER_GAMMA = 0.5772156649


def child_generators(seed, n):
    """``n`` independent generators derived from ``seed``."""
    children = np.random.SeedSequence(seed).spawn(n)
    return [np.random.Generator(np.random.PCG64(c)) for c in children]


def _run(fn, items, n_jobs):
    workers = min(resolve_threads(n_jobs), len(items))
    if workers <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def average_path_length(n):
    """Average path length of an unsuccessful BST search over ``n`` points.

    ``c(n) = 2 (ln(n - 1) + gamma) - 2 (n - 1) / n`` for ``n > 2``, with
    ``c(0) = c(1) = 0`` and ``c(2) = 1``. Accepts scalars or arrays.
    """
    n_arr = np.asarray(n, dtype=np.float64)
    out = np.zeros_like(n_arr)
    out[n_arr == 2] = 1.0
    big = n_arr > 2
    nb = n_arr[big]
    out[big] = 2.0 * (np.log(nb - 1.0) + EULER_GAMMA) - 2.0 * (nb - 1.0) / nb
    return float(out) if out.ndim == 0 else out


@dataclass
class IsoTree:
    """Flat array form of one isolation tree.

    ``feature[i] == -1`` marks an external node whose ``size[i]`` is the
    number of subsample points that reached it.
    """

    feature: np.ndarray
    threshold: np.ndarray
    left: np.ndarray
    right: np.ndarray
    size: np.ndarray

    @property
    def depth(self):
        depths = np.zeros(len(self.feature), dtype=np.int64)
        for i in range(len(self.feature)):
            if self.feature[i] >= 0:
                depths[self.left[i]] = depths[i] + 1
                depths[self.right[i]] = depths[i] + 1
        return int(depths.max())

    def path_lengths(self, X):
        """Depth reached by each row plus ``c(size)`` at the external node."""
        node = np.zeros(X.shape[0], dtype=np.int64)
        depth = np.zeros(X.shape[0], dtype=np.float64)
        active = self.feature[node] >= 0
        while active.any():
            rows = np.flatnonzero(active)
            cur = node[rows]
            go_left = X[rows, self.feature[cur]] < self.threshold[cur]
            node[rows] = np.where(go_left, self.left[cur], self.right[cur])
            depth[rows] += 1.0
            active = self.feature[node] >= 0
        return depth + average_path_length(self.size[node])


def grow_tree(X, height_limit, rng):
    """Grow one isolation tree on the rows of ``X``.

    At each node a feature is drawn uniformly, redrawing while the chosen
    feature is constant on the node's slice; the split value is uniform in
    the open interval between the slice minimum and maximum. A node with at
    most one row, at the height limit, or with every feature constant is
    external.
    """
    feature, threshold, left, right, size = [], [], [], [], []

    def new_node():
        for arr, v in ((feature, -1), (threshold, 0.0), (left, -1),
                       (right, -1), (size, 0)):
            arr.append(v)
        return len(feature) - 1

    root = new_node()
    stack = [(root, np.arange(X.shape[0]), 0)]
    while stack:
        node, rows, depth = stack.pop()
        size[node] = len(rows)
        if depth >= height_limit or len(rows) <= 1:
            continue
        sub = X[rows]
        lo, hi = sub.min(axis=0), sub.max(axis=0)
        varying = hi > lo
        if not varying.any():
            continue
        f = int(rng.integers(X.shape[1]))
        while not varying[f]:
            f = int(rng.integers(X.shape[1]))
        split = rng.uniform(lo[f], hi[f])
        while split <= lo[f]:
            split = rng.uniform(lo[f], hi[f])
        mask = sub[:, f] < split
        feature[node], threshold[node] = f, float(split)
        left[node], right[node] = new_node(), new_node()
        stack.append((right[node], rows[~mask], depth + 1))
        stack.append((left[node], rows[mask], depth + 1))

    return IsoTree(np.array(feature, dtype=np.int64),
                   np.array(threshold, dtype=np.float64),
                   np.array(left, dtype=np.int64),
                   np.array(right, dtype=np.int64),
                   np.array(size, dtype=np.int64))


@dataclass
class IsoForest:
    trees: list
    psi: int
    seed: int

    def mean_path_length(self, X, n_jobs=1):
        per_tree = _run(lambda tree: tree.path_lengths(X), self.trees, n_jobs)
        total = np.zeros(X.shape[0], dtype=np.float64)
        for h in per_tree:  # fixed summation order
            total += h
        return total / len(self.trees)


def iforest_fit(train, n_trees=100, psi=256, seed=0, n_jobs=1):
    """Grow ``n_trees`` isolation trees, each on its own subsample of
    ``psi`` rows drawn without replacement. ``psi`` is clamped to the number
    of train rows; trees are height-limited to ``ceil(log2(psi))``."""
    train = check_matrix(train, "train")
    if train.shape[0] < 2:
        raise ValueError("isolation forest needs at least 2 train rows")
    if n_trees < 1:
        raise ValueError("n_trees must be >= 1")
    if psi < 2:
        raise ValueError("psi must be >= 2")
    psi = min(int(psi), train.shape[0])
    height_limit = math.ceil(math.log2(psi))

    def build(rng):
        rows = rng.choice(train.shape[0], size=psi, replace=False)
        return grow_tree(train[rows], height_limit, rng)

    trees = _run(build, child_generators(seed, n_trees), n_jobs)
    return IsoForest(trees=trees, psi=psi, seed=seed)


def anomaly_score_from_path(mean_path, psi):
    """``2 ** (-E[h] / c(psi))``."""
    return np.power(2.0, -np.asarray(mean_path, dtype=np.float64)
                    / average_path_length(psi))


def iforest_scores(forest, query, n_jobs=1):
    """Isolation scores in (0, 1]; larger is more anomalous."""
    query = check_matrix(query, "query")
    return anomaly_score_from_path(forest.mean_path_length(query, n_jobs),
                                   forest.psi)


class IForest(BaseDetector):
    """Isolation Forest.

    Parameters
    ----------
    n_estimators : int, default 100
    max_samples : int, default 256
        Subsample size per tree; clamped to the number of train rows.
    seed : int, default 0
    """

    algo = "iforest"
    _param_names = ("n_estimators", "max_samples", "seed")

    def __init__(self, n_estimators=100, max_samples=256, seed=0,
                 contamination=0.1, n_jobs=1):
        super().__init__(contamination=contamination, n_jobs=n_jobs)
        self.n_estimators = int(n_estimators)
        self.max_samples = int(max_samples)
        self.seed = int(seed)

    def _fit(self, X):
        self.forest_ = iforest_fit(X, self.n_estimators, self.max_samples,
                                   self.seed, n_jobs=self.n_jobs)
        return iforest_scores(self.forest_, X, n_jobs=self.n_jobs)

    def _score(self, X):
        return iforest_scores(self.forest_, X, n_jobs=self.n_jobs)

    def _get_state(self):
        return {
            "psi": self.forest_.psi,
            "trees": [{name: getattr(t, name).tolist()
                       for name in ("feature", "threshold", "left", "right",
                                    "size")}
                      for t in self.forest_.trees],
        }

    def _set_state(self, state):
        trees = [IsoTree(np.array(t["feature"], dtype=np.int64),
                         np.array(t["threshold"], dtype=np.float64),
                         np.array(t["left"], dtype=np.int64),
                         np.array(t["right"], dtype=np.int64),
                         np.array(t["size"], dtype=np.int64))
                 for t in state["trees"]]
        self.forest_ = IsoForest(trees=trees, psi=int(state["psi"]),
                                 seed=self.seed)


def subset_size_bounds(n_features, min_features=None, max_features=None):
    """Inclusive range of bagged subset sizes: ``[ceil(d/2), d-1]`` by
    default, or all of a single feature."""
    if n_features == 1:
        lo = hi = 1
    else:
        lo, hi = math.ceil(n_features / 2), n_features - 1
    if min_features is not None:
        lo = int(min_features)
    if max_features is not None:
        hi = int(max_features)
    if not 1 <= lo <= hi <= n_features:
        raise ValueError(
            f"invalid feature subset bounds [{lo}, {hi}] for d={n_features}")
    return lo, hi


def draw_feature_subset(rng, n_features, lo, hi):
    size = int(rng.integers(lo, hi + 1))
    return np.sort(rng.choice(n_features, size=size, replace=False))


class FeatureBagging(BaseDetector):
    """Feature Bagging over LOF base detectors.

    Every round fits LOF on a random feature subset whose size is drawn
    uniformly from ``[ceil(d/2), d-1]``. Round scores are z-standardized
    with that round's train mean and std, then combined across rounds.

    Parameters
    ----------
    n_rounds : int, default 10
    base_k : int, default 10
        Neighborhood size of the LOF base detectors.
    combine : {"average", "max"}, default "average"
    seed : int, default 0
    min_features, max_features : int or None
        Override the subset size bounds, e.g. ``min_features=d`` forces the
        full feature set every round.
    """

    algo = "fb"
    _param_names = ("n_rounds", "base_k", "combine", "seed", "min_features",
                    "max_features")

    def __init__(self, n_rounds=10, base_k=10, combine="average", seed=0,
                 min_features=None, max_features=None, contamination=0.1,
                 n_jobs=1):
        super().__init__(contamination=contamination, n_jobs=n_jobs)
        if n_rounds < 1:
            raise ValueError("n_rounds must be >= 1")
        if combine not in ("average", "max"):
            raise ValueError(f"unknown combine {combine!r}")
        self.n_rounds = int(n_rounds)
        self.base_k = int(base_k)
        self.combine = combine
        self.seed = int(seed)
        self.min_features = min_features
        self.max_features = max_features

    def _combine(self, columns):
        S = np.column_stack(columns)
        return combine_average(S) if self.combine == "average" else combine_max(S)

    def _fit(self, X):
        lo, hi = subset_size_bounds(X.shape[1], self.min_features,
                                    self.max_features)
        self.subsets_ = [draw_feature_subset(rng, X.shape[1], lo, hi)
                         for rng in child_generators(self.seed, self.n_rounds)]

        def fit_round(feats):
            return LOF(k=self.base_k).fit(X[:, feats])

        self.estimators_ = _run(fit_round, self.subsets_, self.n_jobs)
        self.round_mean_ = np.array([e.score_mean_ for e in self.estimators_])
        self.round_std_ = np.array([e.score_std_ for e in self.estimators_])
        return self._combine([self._standardize(i, e.decision_scores_)
                              for i, e in enumerate(self.estimators_)])

    def _standardize(self, i, scores):
        if self.round_std_[i] == 0:
            return np.zeros_like(scores)
        return (scores - self.round_mean_[i]) / self.round_std_[i]

    def _score(self, X):
        def score_round(i):
            return self._standardize(
                i, self.estimators_[i].decision_function(X[:, self.subsets_[i]]))

        return self._combine(_run(score_round, list(range(self.n_rounds)),
                                  self.n_jobs))

    def _get_state(self):
        return {
            "subsets": [s.tolist() for s in self.subsets_],
            "round_mean": self.round_mean_.tolist(),
            "round_std": self.round_std_.tolist(),
            "rounds": [e._get_state() for e in self.estimators_],
        }

    def _set_state(self, state):
        self.subsets_ = [np.array(s, dtype=np.int64) for s in state["subsets"]]
        self.round_mean_ = np.array(state["round_mean"], dtype=np.float64)
        self.round_std_ = np.array(state["round_std"], dtype=np.float64)
        self.estimators_ = []
        for feats, rs in zip(self.subsets_, state["rounds"]):
            lof = LOF(k=self.base_k)
            lof._set_state(rs)
            lof.n_features_in_ = len(feats)
            # train-score statistics of the base models are not persisted
            lof.decision_scores_ = np.empty(0)
            self.estimators_.append(lof)


def feature_bagging_scores(train, query=None, n_rounds=10, base_k=10,
                           combine="average", seed=0, min_features=None,
                           max_features=None, n_jobs=1):
    """Functional form of :class:`FeatureBagging`; ``query=None`` returns
    the train scores."""
    model = FeatureBagging(n_rounds=n_rounds, base_k=base_k, combine=combine,
                           seed=seed, min_features=min_features,
                           max_features=max_features, n_jobs=n_jobs)
    model.fit(train)
    if query is None:
        return model.decision_scores_
    return model.decision_function(query)
