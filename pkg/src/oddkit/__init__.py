"""Outlier detection toolkit.

Every detector shares one interface: ``fit(X)`` computes train scores
(``decision_scores_``), a contamination threshold (``threshold_``) and train
labels (``labels_``); ``decision_function``, ``predict`` and
``predict_proba`` then score unseen data. Scores are oriented so that larger
always means more anomalous.

>>> from oddkit import ABOD, generate_data, evaluate_format
>>> X_train, y_train, X_test, y_test = generate_data(200, 100, 2, seed=1)
>>> clf = ABOD(k=10).fit(X_train)
>>> print(evaluate_format("ABOD", y_test, clf.decision_function(X_test)))
ABOD Performance; ROC: ...; Precision at n: ...
"""

from .combination import (combine, combine_aom, combine_average, combine_max,
                          combine_moa)
from .core import (BaseDetector, DataError, labels_from_scores, proba_linear,
                   proba_unify, threshold_from_scores, zscore_standardize)
from .data import (LabeledDataset, evaluate_format, evaluate_print,
                   generate_data, precision_at_n, read_labeled_csv, roc_auc,
                   write_scores_csv)
from .ensemble import FeatureBagging, IForest, average_path_length
from .linear import PCA
from .neighbors import NeighborIndex, euclidean, knn_query
from .persistence import ALGORITHMS, load_model, make_detector, save_model
from .proximity import ABOD, HBOS, KNN, LOF

__version__ = "0.1.0"

__all__ = [
    "ABOD", "ALGORITHMS", "BaseDetector", "DataError", "FeatureBagging",
    "HBOS", "IForest", "KNN", "LOF", "LabeledDataset", "NeighborIndex", "PCA",
    "average_path_length", "combine", "combine_aom", "combine_average",
    "combine_max", "combine_moa", "euclidean", "evaluate_format",
    "evaluate_print", "generate_data", "knn_query", "labels_from_scores",
    "load_model", "make_detector", "precision_at_n", "proba_linear",
    "proba_unify", "read_labeled_csv", "roc_auc", "save_model",
    "threshold_from_scores", "write_scores_csv", "zscore_standardize",
]
