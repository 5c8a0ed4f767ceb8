"""
Combining detectors
===================

Scores from different detectors live on different scales, so standardize
the columns first, then merge them with average, max, AOM or MOA.
"""

import numpy as np

from oddkit import (KNN, LOF, HBOS, PCA, IForest, combine, evaluate_format,
                    generate_data, zscore_standardize)

X_train, y_train, X_test, y_test = generate_data(
    n_train=400, n_test=200, n_features=4, seed=3)

detectors = [KNN(k=k) for k in (5, 10, 20)] + [
    LOF(k=k) for k in (10, 20, 40)] + [HBOS(), PCA(), IForest(seed=0)]

train_scores = np.column_stack([d.fit(X_train).decision_scores_
                                for d in detectors])
test_scores = np.column_stack([d.decision_function(X_test) for d in detectors])

# standardize test columns with the train mean/std of each detector
mean, std = train_scores.mean(axis=0), train_scores.std(axis=0)
test_z = (test_scores - mean) / std

for d, col in zip(detectors, test_z.T):
    print(evaluate_format(type(d).__name__, y_test, col))

print()
for method, buckets in (("average", None), ("max", None), ("aom", 3),
                        ("moa", 3)):
    combined = combine(test_z, method, n_buckets=buckets, seed=0)
    print(evaluate_format(method.upper(), y_test, combined))

# plain z-scoring of the test matrix itself also works when no train scores
# are at hand
print(evaluate_format("AOM (test z)", y_test,
                      combine(zscore_standardize(test_scores), "aom", 3)))
