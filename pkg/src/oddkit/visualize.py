"""Static scatter plots of detection results (SVG via matplotlib)."""

import numpy as np
from matplotlib.figure import Figure

# (true label, predicted label) -> (element id, legend text, marker, color)
POINT_CLASSES = {
    (0, 0): ("true-inlier-pred-inlier", "inlier, predicted inlier", "o", "tab:blue"),
    (0, 1): ("true-inlier-pred-outlier", "inlier, predicted outlier", "s", "tab:orange"),
    (1, 0): ("true-outlier-pred-inlier", "outlier, predicted inlier", "x", "tab:purple"),
    (1, 1): ("true-outlier-pred-outlier", "outlier, predicted outlier", "^", "tab:red"),
}


def emit_scatter_plot(X, y_true, y_pred, path, title=None):
    """Write a 2-D scatter of ``X`` split into the four truth/prediction
    classes. Empty classes are left out of the figure and legend.

    Each class is drawn as an SVG group whose id is the class name from
    ``POINT_CLASSES``.
    """
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2 or X.shape[1] != 2:
        raise ValueError("scatter plots need exactly 2 features")
    y_true = np.asarray(y_true).astype(int).ravel()
    y_pred = np.asarray(y_pred).astype(int).ravel()
    if not len(y_true) == len(y_pred) == X.shape[0]:
        raise ValueError("X, y_true and y_pred must have the same length")

    fig = Figure(figsize=(6, 6))
    ax = fig.subplots()
    for (t, p), (gid, text, marker, color) in POINT_CLASSES.items():
        mask = (y_true == t) & (y_pred == p)
        if mask.any():
            ax.scatter(X[mask, 0], X[mask, 1], marker=marker, c=color,
                       label=text, gid=gid, s=20)
    ax.set_xlabel("x0")
    ax.set_ylabel("x1")
    if title:
        ax.set_title(title)
    ax.legend(loc="best")
    # no timestamp, so identical inputs give identical files
    fig.savefig(path, format="svg", metadata={"Date": None})
