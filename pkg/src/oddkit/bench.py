"""Benchmark several detectors over several labeled datasets."""

import csv
import io
import time

import numpy as np

from .data import precision_at_n, roc_auc
from .persistence import ALGORITHMS, make_detector

# scores drawn uniformly at random; a floor every detector should beat
RANDOM_BASELINE = "random"
COLUMNS = ("dataset", "algo", "roc", "prec_n", "fit_ms", "score_ms")


def _run_once(algo, X_train, X_test, y_test, seed, params, n_jobs):
    if algo == RANDOM_BASELINE:
        t0 = time.perf_counter()
        rng = np.random.default_rng(seed)
        t1 = time.perf_counter()
        scores = rng.random(X_test.shape[0])
        t2 = time.perf_counter()
    else:
        cls = ALGORITHMS[algo][0]
        kwargs = dict(params or {})
        if "seed" in cls._param_names:
            kwargs["seed"] = seed
        det = make_detector(algo, n_jobs=n_jobs, **kwargs)
        t0 = time.perf_counter()
        det.fit(X_train)
        t1 = time.perf_counter()
        scores = det.decision_function(X_test)
        t2 = time.perf_counter()
    return (roc_auc(y_test, scores), precision_at_n(y_test, scores),
            1e3 * (t1 - t0), 1e3 * (t2 - t1))


def run_benchmark(datasets, algos, seeds=(0,), params=None, n_jobs=1):
    """Evaluate every (dataset, algorithm) pair.

    Parameters
    ----------
    datasets : dict
        name -> (X_train, y_train, X_test, y_test).
    algos : list of str
        Registry names, plus ``"random"`` for a random-score baseline.
    seeds : sequence of int
        Detector seeds; metrics and timings are averaged over them.
    params : dict, optional
        Extra detector parameters keyed by algorithm name.

    Returns
    -------
    rows : list of dict
        One row per pair with keys from ``COLUMNS``. A failing pair has its
        metric fields set to None and the message under ``"error"``.
    """
    if not datasets or not algos:
        raise ValueError("need at least one dataset and one algorithm")
    params = params or {}
    rows = []
    for name, (X_train, _, X_test, y_test) in datasets.items():
        for algo in algos:
            row = {"dataset": name, "algo": algo}
            try:
                if algo != RANDOM_BASELINE and algo not in ALGORITHMS:
                    raise ValueError(f"unknown algorithm {algo!r}")
                runs = np.array([
                    _run_once(algo, X_train, X_test, y_test, s,
                              params.get(algo), n_jobs)
                    for s in seeds])
                row.update(zip(COLUMNS[2:], runs.mean(axis=0).tolist()))
                row["error"] = None
            except Exception as exc:  # recorded per cell, others continue
                row.update(dict.fromkeys(COLUMNS[2:]))
                row["error"] = f"{type(exc).__name__}: {exc}"
            rows.append(row)
    return rows


def _cells(row):
    if row["error"] is not None:
        return [row["dataset"], row["algo"], "ERROR", "ERROR", "ERROR", "ERROR"]
    return [row["dataset"], row["algo"], f"{row['roc']:.4f}",
            f"{row['prec_n']:.4f}", f"{row['fit_ms']:.3g}",
            f"{row['score_ms']:.3g}"]


def format_table(rows):
    """Aligned plain-text table."""
    table = [list(COLUMNS)] + [_cells(r) for r in rows]
    widths = [max(len(r[j]) for r in table) for j in range(len(COLUMNS))]
    lines = ["  ".join(c.ljust(w) if j < 2 else c.rjust(w)
                       for j, (c, w) in enumerate(zip(r, widths))).rstrip()
             for r in table]
    return "\n".join(lines)


def format_csv(rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(COLUMNS)
    for r in rows:
        if r["error"] is not None:
            w.writerow([r["dataset"], r["algo"]] + ["ERROR"] * 4)
        else:
            w.writerow([r["dataset"], r["algo"], repr(r["roc"]),
                        repr(r["prec_n"]), f"{r['fit_ms']:.3g}",
                        f"{r['score_ms']:.3g}"])
    return buf.getvalue()
