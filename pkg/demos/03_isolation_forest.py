"""
Inside an isolation forest
==========================

Anomalies are isolated by fewer random splits. The score normalizes the
mean path length by c(psi), the expected path length of an unsuccessful
search in a binary search tree built on psi points.
"""

import numpy as np

from oddkit.ensemble import (IForest, anomaly_score_from_path,
                             average_path_length, iforest_fit)

for n in (2, 16, 256, 4096):
    print(f"c({n}) = {average_path_length(n):.4f}")

rng = np.random.default_rng(0)
X = np.vstack([rng.normal(size=(500, 2)), [[6.0, 6.0], [-5.0, 7.0]]])

forest = iforest_fit(X, n_trees=100, psi=256, seed=0)
print("trees:", len(forest.trees), "max depth:",
      max(t.depth for t in forest.trees))

probe = np.array([[0.0, 0.0], [2.0, 2.0], [6.0, 6.0]])
h = forest.mean_path_length(probe)
for point, depth, score in zip(probe, h, anomaly_score_from_path(h, forest.psi)):
    print(f"{point}: mean path {depth:.2f} -> score {score:.3f}")

# a point whose expected path equals c(psi) sits exactly at 0.5
print("score at E[h] = c(psi):",
      anomaly_score_from_path(average_path_length(256), 256))

# the detector wrapper adds thresholding; threads do not change results
a = IForest(seed=3, n_jobs=1).fit(X)
b = IForest(seed=3, n_jobs=4).fit(X)
print("identical across thread counts:",
      np.array_equal(a.decision_scores_, b.decision_scores_))
print("flagged:", np.flatnonzero(a.labels_)[-5:])
