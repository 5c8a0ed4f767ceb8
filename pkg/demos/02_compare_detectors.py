"""
Comparing every detector
========================

Run each registered algorithm on the same generated data, averaging over a
few detector seeds, and print ROC / precision at n with timings.
"""

from oddkit import ALGORITHMS, generate_data
from oddkit.bench import format_table, run_benchmark

datasets = {}
for n_features in (2, 5):
    datasets[f"gauss-{n_features}d"] = generate_data(
        n_train=500, n_test=250, n_features=n_features, seed=7)

# "random" scores uniformly at random and serves as a floor
algos = list(ALGORITHMS) + ["random"]
rows = run_benchmark(datasets, algos, seeds=(0, 1, 2))
print(format_table(rows))

best = max((r for r in rows if r["error"] is None), key=lambda r: r["roc"])
print(f"\nbest ROC: {best['algo']} on {best['dataset']} ({best['roc']:.3f})")
