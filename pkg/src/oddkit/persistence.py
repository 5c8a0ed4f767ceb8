"""Algorithm registry and JSON model files.

A model file is a self-describing JSON document::

    {"format_version": 1, "algo": "knn", "params": {...},
     "n_features": 2, "state": {...},
     "train_stats": {"scores": [...], "threshold": ..., "mean": ...,
                     "std": ..., "min": ..., "max": ...,
                     "contamination": ...}}

Floats are written with ``repr`` precision, so loading reproduces every
array bit for bit and a reloaded detector scores exactly like the original.
"""

import json

import numpy as np

from .core import DataError
from .ensemble import FeatureBagging, IForest
from .linear import PCA
from .proximity import ABOD, HBOS, KNN, LOF

FORMAT_VERSION = 1

# CLI name -> (class, fixed constructor arguments)
ALGORITHMS = {
    "knn": (KNN, {"method": "largest"}),
    "avgknn": (KNN, {"method": "mean"}),
    "medknn": (KNN, {"method": "median"}),
    "lof": (LOF, {}),
    "abod": (ABOD, {}),
    "hbos": (HBOS, {}),
    "pca": (PCA, {}),
    "iforest": (IForest, {}),
    "fb": (FeatureBagging, {}),
}


def make_detector(algo, **params):
    """Instantiate a detector by registry name, ignoring ``None`` params."""
    if algo not in ALGORITHMS:
        raise ValueError(
            f"unknown algorithm {algo!r}; valid: {', '.join(ALGORITHMS)}")
    cls, fixed = ALGORITHMS[algo]
    kwargs = {k: v for k, v in params.items() if v is not None}
    kwargs.update(fixed)
    return cls(**kwargs)


def _registry_name(detector):
    for name, (cls, fixed) in ALGORITHMS.items():
        if type(detector) is cls and all(
                getattr(detector, k) == v for k, v in fixed.items()):
            return name
    raise ValueError(f"{type(detector).__name__} is not a registered algorithm")


def to_dict(detector):
    detector._check_fitted()
    params = detector.get_params()
    return {
        "format_version": FORMAT_VERSION,
        "algo": _registry_name(detector),
        "params": params,
        "n_features": detector.n_features_in_,
        "state": detector._get_state(),
        "train_stats": {
            "scores": detector.decision_scores_.tolist(),
            "threshold": detector.threshold_,
            "mean": detector.score_mean_,
            "std": detector.score_std_,
            "min": detector.score_min_,
            "max": detector.score_max_,
            "contamination": detector.contamination,
        },
    }


def from_dict(doc):
    try:
        version = doc["format_version"]
        if version != FORMAT_VERSION:
            raise DataError(f"unsupported model format_version {version}")
        algo = doc["algo"]
        if algo not in ALGORITHMS:
            raise DataError(f"model file names unknown algorithm {algo!r}")
        fixed = ALGORITHMS[algo][1]
        params = {k: v for k, v in doc["params"].items() if k not in fixed}
        det = make_detector(algo, **params)
        det.n_features_in_ = int(doc["n_features"])
        det._set_state(doc["state"])
        stats = doc["train_stats"]
        det.decision_scores_ = np.array(stats["scores"], dtype=np.float64)
        det.threshold_ = float(stats["threshold"])
        det.labels_ = (det.decision_scores_ > det.threshold_).astype(np.int64)
        det.score_mean_ = float(stats["mean"])
        det.score_std_ = float(stats["std"])
        det.score_min_ = float(stats["min"])
        det.score_max_ = float(stats["max"])
    except (KeyError, TypeError) as exc:
        raise DataError(f"malformed model document: {exc!r}") from None
    return det


def save_model(detector, path):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(to_dict(detector), fh, indent=1)
        fh.write("\n")


def load_model(path):
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except json.JSONDecodeError as exc:
        raise DataError(f"{path}: not a JSON model file ({exc})") from None
    return from_dict(doc)
