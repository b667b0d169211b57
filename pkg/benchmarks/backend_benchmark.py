"""Compare the compiled split-search kernel against the pure-Python
fallback on identical workloads, and verify they grow identical trees
while timing them.

Run:  python3 benchmarks/backend_benchmark.py [--sizes 500,2000,8000]
"""

import argparse
import time

import numpy as np

from metacash.engine import available_backends, get_backend, grow_tree


def make_problem(n, p, n_classes, seed):
    rng = np.random.default_rng(seed)
    X = rng.normal(size=(n, p))
    centers = rng.normal(scale=2.0, size=(n_classes, p))
    y = rng.integers(0, n_classes, size=n)
    X += centers[y]
    return X, y


def time_backend(name, X, y, n_classes, repeats):
    be = get_backend(name)
    best = float("inf")
    tree = None
    for _ in range(repeats):
        t0 = time.perf_counter()
        tree = grow_tree(X, y, n_classes=n_classes, criterion="gini",
                         seed=11, backend=be)
        best = min(best, time.perf_counter() - t0)
    return best, tree


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--sizes", default="500,2000,8000")
    ap.add_argument("--features", type=int, default=20)
    ap.add_argument("--classes", type=int, default=3)
    ap.add_argument("--repeats", type=int, default=3)
    args = ap.parse_args()

    names = available_backends()
    if "compiled" not in names:
        print("compiled backend not built; timing python only")
    print("%8s  %10s  %10s  %8s  %s" % ("n", "compiled", "python",
                                        "speedup", "identical"))
    for n in [int(s) for s in args.sizes.split(",")]:
        X, y = make_problem(n, args.features, args.classes, seed=n)
        row = {}
        trees = {}
        for name in names:
            row[name], trees[name] = time_backend(name, X, y, args.classes,
                                                  args.repeats)
        if "compiled" in names:
            a, b = trees["compiled"], trees["python"]
            same = (np.array_equal(a.feature, b.feature)
                    and np.array_equal(a.threshold, b.threshold,
                                       equal_nan=True)
                    and np.array_equal(a.value, b.value))
            print("%8d  %9.4fs  %9.4fs  %7.1fx  %s"
                  % (n, row["compiled"], row["python"],
                     row["python"] / row["compiled"], same))
        else:
            print("%8d  %10s  %9.4fs" % (n, "-", row["python"]))


if __name__ == "__main__":
    main()
