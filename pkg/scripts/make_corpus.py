"""Generate the bundled synthetic classification corpus.

Twenty small datasets across five shape archetypes (four variants each),
written as CSV plus a manifest. Deterministic: rerunning reproduces the
same bytes. The first ten manifest rows form the small build corpus;
recommendation-quality checks use all twenty.

Usage: python3 scripts/make_corpus.py [out_dir]
"""

import os
import sys

import numpy as np

LABELS = ("alpha", "beta", "gamma", "delta")


def _blobs(rng, n, n_classes, spread, p=3):
    centers = rng.normal(scale=3.0, size=(n_classes, p))
    per = np.full(n_classes, n // n_classes)
    per[: n % n_classes] += 1
    X, y = [], []
    for c in range(n_classes):
        X.append(centers[c] + rng.normal(scale=spread, size=(per[c], p)))
        y.extend([c] * per[c])
    return np.vstack(X), np.array(y)


def _xor(rng, n, noise):
    X = rng.uniform(-1.0, 1.0, size=(n, 2))
    y = ((X[:, 0] * X[:, 1]) > 0).astype(int)
    flip = rng.random(n) < noise
    y[flip] = 1 - y[flip]
    X = np.column_stack([X, rng.normal(size=n)])
    return X, y


def _rings(rng, n, n_rings, noise):
    y = rng.integers(0, n_rings, size=n)
    radius = 1.0 + 1.5 * y + rng.normal(scale=noise, size=n)
    angle = rng.uniform(0.0, 2.0 * np.pi, size=n)
    X = np.column_stack([radius * np.cos(angle), radius * np.sin(angle)])
    return X, y


def _linsep(rng, n, p, margin):
    X = rng.normal(size=(n, p))
    w = rng.normal(size=p)
    w /= np.linalg.norm(w)
    score = X @ w
    y = (score > 0).astype(int)
    X[y == 1] += margin * w
    X[y == 0] -= margin * w
    return X, y


def _catmix(rng, n, n_classes, noise):
    """Two informative numeric columns, two categorical columns (one
    informative, one noise), some missing cells."""
    x1 = rng.normal(size=n)
    x2 = rng.normal(size=n)
    cat_inf = rng.integers(0, 3, size=n)
    cat_noise = rng.integers(0, 4, size=n)
    score = x1 + 0.8 * x2 + 1.5 * cat_inf
    edges = np.quantile(score, np.linspace(0, 1, n_classes + 1)[1:-1])
    y = np.searchsorted(edges, score)
    flip = rng.random(n) < noise
    y[flip] = rng.integers(0, n_classes, size=int(flip.sum()))
    return x1, x2, cat_inf, cat_noise, y


def _write_numeric_csv(path, X, y, rng, missing_rate=0.0):
    n, p = X.shape
    names = ["x%d" % (j + 1) for j in range(p)]
    with open(path, "w", encoding="utf-8") as f:
        f.write(",".join(names + ["target"]) + "\n")
        for i in range(n):
            cells = []
            for j in range(p):
                if missing_rate and rng.random() < missing_rate:
                    cells.append("")
                else:
                    cells.append("%.6f" % X[i, j])
            cells.append(LABELS[y[i]])
            f.write(",".join(cells) + "\n")


def _write_catmix_csv(path, parts, rng, missing_rate):
    x1, x2, cat_inf, cat_noise, y = parts
    inf_names = ("low", "mid", "high")
    noise_names = ("north", "south", "east", "west")
    with open(path, "w", encoding="utf-8") as f:
        f.write("x1,x2,grade,region,target\n")
        for i in range(len(y)):
            cells = [
                "" if rng.random() < missing_rate else "%.6f" % x1[i],
                "%.6f" % x2[i],
                "?" if rng.random() < missing_rate else inf_names[cat_inf[i]],
                noise_names[cat_noise[i]],
                LABELS[y[i]],
            ]
            f.write(",".join(cells) + "\n")


def build_corpus(out_dir):
    os.makedirs(out_dir, exist_ok=True)
    manifest = []

    spec = [
        ("blobs", dict(n=180, n_classes=2, spread=1.0)),
        ("blobs", dict(n=220, n_classes=3, spread=1.4)),
        ("blobs", dict(n=240, n_classes=4, spread=1.8)),
        ("blobs", dict(n=160, n_classes=2, spread=2.4)),
        ("xor", dict(n=200, noise=0.02)),
        ("xor", dict(n=240, noise=0.08)),
        ("xor", dict(n=180, noise=0.15)),
        ("xor", dict(n=220, noise=0.25)),
        ("rings", dict(n=200, n_rings=2, noise=0.15)),
        ("rings", dict(n=240, n_rings=3, noise=0.2)),
        ("rings", dict(n=180, n_rings=2, noise=0.35)),
        ("rings", dict(n=220, n_rings=3, noise=0.45)),
        ("linsep", dict(n=180, p=6, margin=1.2)),
        ("linsep", dict(n=220, p=10, margin=0.8)),
        ("linsep", dict(n=240, p=4, margin=0.4)),
        ("linsep", dict(n=200, p=8, margin=0.15)),
        ("catmix", dict(n=200, n_classes=2, noise=0.05)),
        ("catmix", dict(n=240, n_classes=3, noise=0.1)),
        ("catmix", dict(n=180, n_classes=2, noise=0.2)),
        ("catmix", dict(n=220, n_classes=3, noise=0.3)),
    ]

    # interleave archetypes so the build corpus (first ten) spans all five
    order = []
    by_kind = {}
    for kind, kwargs in spec:
        by_kind.setdefault(kind, []).append((kind, kwargs))
    for round_idx in range(4):
        for kind in ("blobs", "xor", "rings", "linsep", "catmix"):
            order.append(by_kind[kind][round_idx])

    for idx, (kind, kwargs) in enumerate(order):
        ds_id = "%s-%02d" % (kind, idx + 1)
        rng = np.random.default_rng([20240811, idx])
        path = os.path.join(out_dir, ds_id + ".csv")
        if kind == "blobs":
            X, y = _blobs(rng, **kwargs)
            _write_numeric_csv(path, X, y, rng)
        elif kind == "xor":
            X, y = _xor(rng, **kwargs)
            _write_numeric_csv(path, X, y, rng)
        elif kind == "rings":
            X, y = _rings(rng, **kwargs)
            _write_numeric_csv(path, X, y, rng)
        elif kind == "linsep":
            X, y = _linsep(rng, **kwargs)
            _write_numeric_csv(path, X, y, rng, missing_rate=0.01)
        else:
            parts = _catmix(rng, **kwargs)
            _write_catmix_csv(path, parts, rng, missing_rate=0.04)
        manifest.append((ds_id, ds_id + ".csv", "target"))

    manifest_path = os.path.join(out_dir, "manifest.csv")
    with open(manifest_path, "w", encoding="utf-8") as f:
        f.write("id,path,target\n")
        for row in manifest:
            f.write(",".join(row) + "\n")
    return manifest_path


if __name__ == "__main__":
    out = sys.argv[1] if len(sys.argv) > 1 else os.path.join(
        os.path.dirname(os.path.dirname(os.path.abspath(__file__))),
        "data", "corpus")
    path = build_corpus(out)
    print("wrote %s" % path)
