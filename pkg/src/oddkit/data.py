"""Synthetic data, evaluation metrics and CSV input/output."""

import csv
from dataclasses import dataclass
from decimal import ROUND_HALF_UP, Decimal

import numpy as np
from scipy.stats import rankdata

from .core import DataError, check_contamination

OUTLIER_LOW, OUTLIER_HIGH = -6.0, 6.0


@dataclass
class LabeledDataset:
    X: np.ndarray
    y: np.ndarray

    def __post_init__(self):
        if len(self.y) != self.X.shape[0]:
            raise ValueError("X and y have different lengths")
        if not np.isin(self.y, (0, 1)).all():
            raise ValueError("labels must be 0 or 1")


def _make_split(rng, n, n_features, contamination):
    n_out = int(round(contamination * n))
    n_in = n - n_out
    X_in = rng.standard_normal((n_in, n_features))
    X_out = rng.uniform(OUTLIER_LOW, OUTLIER_HIGH, (n_out, n_features))
    y = np.concatenate([np.zeros(n_in, np.int64), np.ones(n_out, np.int64)])
    return LabeledDataset(np.vstack([X_in, X_out]), y)


def generate_data(n_train=200, n_test=100, n_features=2, contamination=0.1,
                  seed=42):
    """Gaussian inliers with uniformly scattered outliers.

    Inlier coordinates are i.i.d. N(0, 1); outlier coordinates are i.i.d.
    U(-6, 6). Each split has ``round(contamination * n)`` outliers, placed
    at the end.

    Returns
    -------
    X_train, y_train, X_test, y_test : ndarray
    """
    if min(n_train, n_test, n_features) < 1:
        raise ValueError("n_train, n_test and n_features must be >= 1")
    check_contamination(contamination)
    rng = np.random.default_rng(seed)
    train = _make_split(rng, n_train, n_features, contamination)
    test = _make_split(rng, n_test, n_features, contamination)
    return train.X, train.y, test.X, test.y


def _check_labels(y, scores):
    y = np.asarray(y).ravel()
    scores = np.asarray(scores, dtype=np.float64).ravel()
    if y.shape != scores.shape:
        raise ValueError("y and scores have different lengths")
    if not np.isin(y, (0, 1)).all():
        raise ValueError("labels must be 0 or 1")
    return y.astype(np.int64), scores


def roc_auc(y, scores):
    """Area under the ROC curve via the Mann-Whitney rank statistic, with
    average ranks for tied scores."""
    y, scores = _check_labels(y, scores)
    n_pos = int(y.sum())
    n_neg = y.size - n_pos
    if n_pos == 0 or n_neg == 0:
        raise ValueError("roc_auc needs both classes in y")
    ranks = rankdata(scores, method="average")
    u = ranks[y == 1].sum() - n_pos * (n_pos + 1) / 2.0
    return float(u / (n_pos * n_neg))


def precision_at_n(y, scores):
    """Share of true outliers among the ``n`` top-scored samples, where
    ``n`` is the number of true outliers. Ties go to the lower index."""
    y, scores = _check_labels(y, scores)
    n = int(y.sum())
    if n == 0:
        raise ValueError("precision_at_n needs at least one positive label")
    top = np.argsort(-scores, kind="stable")[:n]
    return float(y[top].sum() / n)


def _round3(x):
    return Decimal(repr(float(x))).quantize(Decimal("0.001"),
                                            rounding=ROUND_HALF_UP)


def evaluate_format(name, y, scores):
    """One-line report, e.g. ``ABOD Performance; ROC: 0.934; Precision at
    n: 0.902``. Values are rounded half away from zero."""
    return format_report(name, roc_auc(y, scores), precision_at_n(y, scores))


def format_report(name, roc, prec):
    return (f"{name} Performance; ROC: {_round3(roc)}; "
            f"Precision at n: {_round3(prec)}")


def evaluate_print(name, y, scores):
    print(evaluate_format(name, y, scores))


# -- CSV -------------------------------------------------------------------

def _is_number(cell):
    try:
        float(cell)
    except ValueError:
        return False
    return True


def read_csv(path):
    """Read a numeric CSV file.

    A first row with any non-numeric cell is treated as a header.

    Returns
    -------
    header : list of str or None
    values : ndarray of shape (n_rows, n_cols)
    """
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    # line numbers are 1-based file lines
    numbered = [(i + 1, r) for i, r in enumerate(rows) if r and any(c.strip() for c in r)]
    if not numbered:
        raise DataError(f"{path}: no data")
    header = None
    if not all(_is_number(c) for c in numbered[0][1]):
        header = [c.strip() for c in numbered[0][1]]
        numbered = numbered[1:]
        if not numbered:
            raise DataError(f"{path}: header but no data rows")
    width = len(header) if header else len(numbered[0][1])
    values = np.empty((len(numbered), width), dtype=np.float64)
    for r, (line, row) in enumerate(numbered):
        if len(row) != width:
            raise DataError(
                f"{path}: line {line}: expected {width} columns, got {len(row)}")
        for c, cell in enumerate(row):
            try:
                v = float(cell)
            except ValueError:
                raise DataError(
                    f"{path}: line {line}: non-numeric value {cell!r}") from None
            if not np.isfinite(v):
                raise DataError(f"{path}: line {line}: non-finite value {cell!r}")
            values[r, c] = v
    return header, values


def read_matrix_csv(path):
    """Feature matrix from a CSV file (header optional)."""
    return read_csv(path)[1]


def read_labels_csv(path):
    """Binary labels from a single-column CSV file, or from the ``label``
    column of a multi-column file."""
    header, values = read_csv(path)
    if values.shape[1] != 1:
        if header is None or "label" not in header:
            raise DataError(f"{path}: expected one column or a 'label' column")
        values = values[:, [header.index("label")]]
    y = values[:, 0]
    if not np.isin(y, (0.0, 1.0)).all():
        raise DataError(f"{path}: labels must be 0 or 1")
    return y.astype(np.int64)


def read_labeled_csv(path, labels_path=None, label_column="label"):
    """Load a :class:`LabeledDataset`.

    Labels come from ``labels_path`` when given, otherwise from the column
    named ``label_column`` in the file's header.
    """
    header, values = read_csv(path)
    if labels_path is not None:
        y = read_labels_csv(labels_path)
        if len(y) != values.shape[0]:
            raise DataError(
                f"{labels_path}: {len(y)} labels for {values.shape[0]} rows")
        return LabeledDataset(values, y)
    if header is None or label_column not in header:
        raise DataError(f"{path}: no {label_column!r} column and no labels file")
    j = header.index(label_column)
    y = values[:, j]
    if not np.isin(y, (0.0, 1.0)).all():
        raise DataError(f"{path}: labels must be 0 or 1")
    return LabeledDataset(np.delete(values, j, axis=1), y.astype(np.int64))


def _fmt(v):
    # repr gives the shortest string that round-trips exactly
    return repr(float(v))


def write_matrix_csv(path, X, header=None):
    X = np.atleast_2d(np.asarray(X, dtype=np.float64))
    if header is None:
        header = [f"x{j}" for j in range(X.shape[1])]
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows([_fmt(v) for v in row] for row in X)


def write_labels_csv(path, y):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["label"])
        w.writerows([int(v)] for v in y)


def write_scores_csv(path, scores, labels=None, probs=None):
    """Write ``score[,label][,proba]`` columns with a header line."""
    scores = np.asarray(scores, dtype=np.float64).ravel()
    header = ["score"]
    cols = [[_fmt(s) for s in scores]]
    if labels is not None:
        header.append("label")
        cols.append([str(int(v)) for v in labels])
    if probs is not None:
        header.append("proba")
        cols.append([_fmt(p) for p in probs])
    for col in cols:
        if len(col) != len(scores):
            raise ValueError("labels/probs length must match scores")
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(zip(*cols))


def read_scores_csv(path):
    """Inverse of :func:`write_scores_csv`: returns a dict of columns."""
    header, values = read_csv(path)
    if header is None:
        header = ["score"] if values.shape[1] == 1 else [
            f"s{j}" for j in range(values.shape[1])]
    out = {name: values[:, j] for j, name in enumerate(header)}
    if "label" in out:
        out["label"] = out["label"].astype(np.int64)
    return out
